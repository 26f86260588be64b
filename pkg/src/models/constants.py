"""
Application constants and configuration values.
"""

# Application constants
APP_NAME = "sqclp"
VERSION = "1.0.0"

# Search defaults
DEFAULT_DEPTH = 6
DEFAULT_LIMIT = 20

# Fixpoint oracle defaults
DEFAULT_UNIVERSE_DEPTH = 1
DEFAULT_ITERATIONS = 10

# Scheme defaults when a program has no directives
DEFAULT_QDOM = "U"
DEFAULT_CDOM = "R"

# Settings file, history and logs live under this directory
HOME_ENV = "SQCLP_HOME"
DEFAULT_HOME = "~/.sqclp"
SETTINGS_FILE = "settings.json"
HISTORY_FILE = "history"
LOG_FILE = "logs/sqclp.log"

# Exit codes
EXIT_OK = 0
EXIT_NO_SOLUTION = 1
EXIT_DIAGNOSTICS = 2

REPL_PROMPT = "sqclp> "
