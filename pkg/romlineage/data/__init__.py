"""Data files shipped with romlineage (machine catalog, builtin signatures)."""
