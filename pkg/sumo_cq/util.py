import hashlib
import json
import logging
import os
import time

from smart_open import open

logger = logging.getLogger(__name__)


def timer(start_time=None):
    if not start_time:
        return time.time()
    return time.time() - start_time


def is_remote(path):
    return "://" in str(path)


def ensure_dir(path):
    if not is_remote(path):
        os.makedirs(path, exist_ok=True)


def exists(path):
    if is_remote(path):
        try:
            with open(str(path), "rb"):
                return True
        except (OSError, ValueError):
            return False
    return os.path.exists(path)


def write_text(path, text):
    """Writes a whole artifact; local files are replaced atomically."""
    path = str(path)
    if is_remote(path):
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return

    parent = os.path.dirname(path)
    if parent:
        ensure_dir(parent)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    os.replace(tmp, path)


def read_text(path):
    with open(str(path), "r", encoding="utf-8") as f:
        return f.read()


def dump_json(obj):
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path, obj):
    write_text(path, dump_json(obj))


def read_json(path):
    with open(str(path), "r", encoding="utf-8") as f:
        return json.load(f)


def jsonl_line(obj):
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n"


def write_jsonl(path, rows):
    write_text(path, "".join(jsonl_line(r) for r in rows))


def read_jsonl(path, tolerate_partial_tail=False):
    rows = []
    with open(str(path), "r", encoding="utf-8") as f:
        lines = f.read().split("\n")

    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rows.append(json.loads(line))
        except json.JSONDecodeError:
            # a crash mid-append leaves at most one broken trailing line
            if tolerate_partial_tail and all(not rest.strip() for rest in lines[lineno:]):
                logger.warning(f"ignoring truncated last line {lineno} of {path}")
                break
            raise
    return rows


def digest(text):
    return hashlib.sha256(text.encode("utf-8", errors="replace")).hexdigest()
