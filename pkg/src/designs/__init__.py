"""Design modules: finite fields, array checks, extension search and constructions."""
