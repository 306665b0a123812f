# --- utils.py ---

import hashlib
import logging
import os
import sys
from pathlib import Path

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


# --- Resource Path Handling (For PyInstaller Bundles) ---
def resource_path(relative_path: str) -> str:
    """ Get absolute path to a bundled resource, works for dev and for PyInstaller """
    try:
        # PyInstaller creates a temp folder and stores path in _MEIPASS
        base_path_str = str(sys._MEIPASS)
    except AttributeError:
        # Not frozen: resources sit next to this module
        base_path_str = str(Path(__file__).parent)
    return os.path.join(base_path_str, relative_path)


# --- Logging ---
def setup_logging(verbosity: int = 0) -> None:
    """
    Configures one stderr handler for the whole process.

    Args:
        verbosity: 0 for INFO, >0 for DEBUG, <0 for WARNING.
    """
    if verbosity > 0:
        level = logging.DEBUG
    elif verbosity < 0:
        level = logging.WARNING
    else:
        level = logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


# --- File I/O Safety ---
def safe_read_file(file_path: Path) -> tuple[str | None, str | None]:
    """Reads a UTF-8 file, returning (content, error)."""
    content = None
    error = None
    try:
        if not file_path.is_file():
            raise FileNotFoundError(f"File not found: {file_path}")
        if not os.access(str(file_path), os.R_OK):
            raise PermissionError(f"Permission denied reading file: {file_path}")
        # newline="" keeps CRLF intact for the csv module
        with open(file_path, "r", encoding="utf-8", newline="") as fh:
            content = fh.read()
        if content.startswith("\ufeff"):
            logger.warning("Stripping UTF-8 BOM from %s", file_path)
            content = content[1:]
    except UnicodeDecodeError as e:
        error = f"{file_path} is not valid UTF-8: {e}"
    except (FileNotFoundError, PermissionError, OSError) as e:
        error = str(e)
    return content, error


def safe_write_file(file_path: Path, content: str) -> tuple[bool, str | None]:
    """Writes content as UTF-8 (no newline translation), returning (success, error)."""
    error = None
    success = False
    try:
        parent_dir = file_path.parent
        if not parent_dir.exists():
            parent_dir.mkdir(parents=True, exist_ok=True)
        if file_path.exists() and not os.access(str(file_path), os.W_OK):
            raise PermissionError(f"Permission denied writing to file: {file_path}")
        with open(file_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
        success = True
    except (PermissionError, FileNotFoundError, OSError) as e:
        error = str(e)
    return success, error


# --- Fingerprints ---
def fingerprint_arrays(*arrays) -> str:
    """SHA-256 over the raw float64 bytes of the given arrays, in order."""
    digest = hashlib.sha256()
    for arr in arrays:
        digest.update(memoryview(arr.astype("<f8", copy=False).tobytes()))
    return digest.hexdigest()
