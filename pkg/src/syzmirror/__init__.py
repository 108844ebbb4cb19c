"""SYZ mirror transformations for toric Fano manifolds."""
