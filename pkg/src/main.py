"""
sqclp - Main entry point

This module serves as the entry point of the command-line tool.
"""

import os
import sys

# Add the repository root to PYTHONPATH dynamically
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.models.constants import EXIT_DIAGNOSTICS
from src.ui.cli import cli_main
from src.utilities.logger import AppLogger


def main() -> None:
    """Main entry point of the application."""
    try:
        code = cli_main()
    except KeyboardInterrupt:
        code = EXIT_DIAGNOSTICS
    except Exception as e:
        AppLogger().error(f"Error in main: {e}", exc_info=True, extra_context={"entry": "main.py"})
        print(f"internal error: {e}", file=sys.stderr)
        code = EXIT_DIAGNOSTICS
    sys.exit(code)


if __name__ == "__main__":
    main()
