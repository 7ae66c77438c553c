"""Management superstructure: containers, ACLs, search, datasets, packages."""
