"""Content-addressed JSON cache with atomic writes."""
import hashlib
import json
import logging
import os
import tempfile

log = logging.getLogger(__name__)

CODE_VERSION = "curvecx-1"


def cache_dir(override=None):
    d = override or os.environ.get("CURVECX_CACHE")
    if not d:
        d = os.path.join(os.path.expanduser("~"), ".cache", "curvecx")
    return d


def provenance(payload) -> str:
    blob = json.dumps({"code": CODE_VERSION, "input": payload}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _path(key, directory):
    return os.path.join(directory, key[:2], key + ".json")


def cache_get(key, directory=None):
    if directory is False:
        return None
    path = _path(key, cache_dir(directory))
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        return None
    except (OSError, ValueError):
        log.warning("corrupt cache entry %s; recomputing", path)
        return None
    if not isinstance(data, dict) or data.get("key") != key:
        log.warning("cache entry %s does not match its key; recomputing", path)
        return None
    return data.get("payload")


def cache_put(key, payload, directory=None):
    if directory is False:
        return payload
    path = _path(key, cache_dir(directory))
    os.makedirs(os.path.dirname(path), exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump({"key": key, "payload": payload}, fh, separators=(",", ":"))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return payload
