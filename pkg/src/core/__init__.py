"""Core engine: constraint domains, proximity, semantics, proof search and the source front end."""
