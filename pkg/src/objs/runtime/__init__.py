"""Access to the bundled runtime helper library (`--emit-runtime`)."""

from __future__ import annotations

import os
import re

_HERE = os.path.dirname(__file__)
RUNTIME_FILE = os.path.join(_HERE, "objs_runtime.js")


def runtime_source() -> str:
    with open(RUNTIME_FILE, encoding="utf-8") as fh:
        return fh.read()


def exported_names() -> set:
    """Names the library attaches to the namespace object, scraped from the
    source so the emitter's helpers_used can be validated against it."""
    src = runtime_source()
    names = set(re.findall(r"^\s*rt\.([A-Za-z_][A-Za-z0-9_]*)\s*=", src,
                           re.MULTILINE))
    names.update(re.findall(r"rt\.(ABI)", src))
    return names
