"""Flat-array files: one JSON header line, a newline, then the raw payload."""
import json


def write_array_file(path, header: dict, payload: bytes) -> None:
    head = dict(header, payload_bytes=len(payload))
    with open(path, "wb") as fh:
        fh.write(json.dumps(head, sort_keys=True).encode())
        fh.write(b"\n")
        fh.write(payload)


def read_array_file(path) -> tuple[dict, bytes]:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline())
        payload = fh.read()
    if len(payload) != header["payload_bytes"]:
        raise ValueError(f"{path}: payload is {len(payload)} bytes, header says "
                         f"{header['payload_bytes']}")
    return header, payload


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
