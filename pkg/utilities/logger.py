# Logger Module
# Centralized engine logging with a bounded history buffer

import sys
import threading
from datetime import datetime

from utilities.config import LOG_BUFFER_SIZE, LOG_ENV_VAR, LOG_LEVEL

LEVELS = {"quiet": 0, "info": 1, "debug": 2}

log_buffer = []
_lock = threading.Lock()
_level = LEVELS.get(LOG_LEVEL, LEVELS["info"])

if LOG_LEVEL not in LEVELS:
    print(f"[emit_log] Unknown {LOG_ENV_VAR}={LOG_LEVEL!r}, using 'info'", file=sys.stderr)


def set_level(name):
    global _level
    if name not in LEVELS:
        raise ValueError(f"log level must be one of {sorted(LEVELS)}, got {name!r}")
    _level = LEVELS[name]


def get_level():
    for name, value in LEVELS.items():
        if value == _level:
            return name
    return "info"


def emit_log(msg, level="info"):
    timestamp = datetime.now().strftime("%H:%M:%S")
    full_msg = f"[{timestamp}] {msg}"
    with _lock:
        log_buffer.append(full_msg)
        if len(log_buffer) > LOG_BUFFER_SIZE:
            log_buffer.pop(0)
    if LEVELS.get(level, LEVELS["info"]) <= _level and _level > 0:
        try:
            print(full_msg, file=sys.stderr)
        except Exception as e:
            print(f"[emit_log error] {e}", file=sys.stderr)


def get_log_history():
    with _lock:
        return list(log_buffer)


def clear_log_history():
    with _lock:
        log_buffer.clear()
