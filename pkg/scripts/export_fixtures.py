"""Write the fixture catalog as QHI files and check that each one round-trips."""
from __future__ import annotations

import argparse
from pathlib import Path

from qhi.fixtures import check_document, fixture_catalog
from qhi.qhifile import parse, serialize, write


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("dir", nargs="?", default="fixtures")
    args = ap.parse_args()
    out = Path(args.dir)
    out.mkdir(parents=True, exist_ok=True)
    for doc in fixture_catalog():
        path = out / f"{doc.name}.qhi"
        write(doc, path)
        same = serialize(parse(path)) == serialize(doc)
        print(f"{path}  r0..r3={doc.tri.counts()}  valid={not check_document(doc)}  roundtrip={same}")


if __name__ == "__main__":
    main()
