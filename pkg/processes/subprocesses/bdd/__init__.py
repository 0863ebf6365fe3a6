"""Decision diagram engine and variable reordering."""
