"""Pure algebra: words, lattices, group rings, Magnus normal forms, nilpotent quotients."""
