import multiprocessing
import sys

from dotenv import load_dotenv

# --- Project Module Imports (Direct Imports for Flat Structure) ---
from cli import main as cli_main


def main() -> int:
    """Loads a local .env (for EMOCLASS_SEED) and runs the command line."""
    load_dotenv()
    return cli_main(sys.argv[1:])


# --- Standard Python Entry Point Check ---
if __name__ == "__main__":
    # freeze_support() must run first so bundled multi-seed workers start cleanly
    multiprocessing.freeze_support()
    sys.exit(main())
