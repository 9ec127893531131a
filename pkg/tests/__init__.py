"""Test suite package placeholder.

Keeps pytest happy until actual unit/integration tests are added."""
