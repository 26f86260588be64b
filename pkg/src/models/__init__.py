"""Models module containing qualification domains, syntax and presets."""
