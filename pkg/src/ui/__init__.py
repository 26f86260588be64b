"""User interface: command line and interactive shell."""
