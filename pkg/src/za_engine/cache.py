"""On-disk cache of mode matrices, one versioned JSON file per (operator, label, mode, window)."""

from __future__ import annotations

import json
import os
import random
import re
import tempfile
from pathlib import Path

from .fock import ModuleLabel, enumerate_basis
from .rational import Rational
from .vop.modes import MODE_MATRIX_VERSION, ModeMatrix, mode_matrix
from .vop.operators import CATALOG, build_operator


def _token(x) -> str:
    text = str(x).replace("+", "p").replace("-", "m").replace("/", "d")
    return re.sub(r"[^0-9A-Za-z]+", "_", text)


class ModeCache:
    """Directory of cached :class:`ModeMatrix` files.

    Files whose header does not match the current format version are treated
    as absent; a load never returns a matrix built under another version.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def path(self, name: str, label: ModuleLabel, nu, window: int) -> Path:
        fname = f"{_token(name)}__j{_token(label.j)}__k{_token(label.k)}__nu{_token(nu)}__N{window}.v{MODE_MATRIX_VERSION}.json"
        return self.root / fname

    def load(self, name: str, label: ModuleLabel, nu, window: int) -> ModeMatrix | None:
        p = self.path(name, label, nu, window)
        try:
            text = p.read_text()
            m = ModeMatrix.from_json(text)
        except (OSError, ValueError, KeyError, TypeError):
            self.misses += 1
            return None
        if (m.name != f"{name}[{m.nu}]" or m.source != label or m.nu != Rational(nu)
                or m.max_degree != window):
            self.misses += 1
            return None
        self.hits += 1
        return m

    def store(self, name: str, label: ModuleLabel, nu, window: int, m: ModeMatrix) -> None:
        p = self.path(name, label, nu, window)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-")
        with os.fdopen(fd, "w") as fh:
            fh.write(m.to_json())
        os.replace(tmp, p)

    def entries(self) -> list[Path]:
        return sorted(self.root.glob(f"*.v{MODE_MATRIX_VERSION}.json"))

    def warm(self, labels, N: int, M: int, names=CATALOG) -> int:
        """Precompute catalog modes ``-offset + t`` (``|t| <= M``) on the degree-``N`` window."""
        count = 0
        for label in labels:
            basis = enumerate_basis(label, N)
            for name in names:
                spec = build_operator(name, label)
                base = -spec.exponent_offset(label)
                for t in range(-M, M + 1):
                    nu = base + t
                    if self.load(name, label, nu, N) is None:
                        self.store(name, label, nu, N, mode_matrix(spec, nu, basis))
                    count += 1
        return count

    def verify(self, sample: int = 10, seed: int = 0) -> list[str]:
        """Recompute a random sample of entries; returns the files that differ."""
        files = self.entries()
        rng = random.Random(seed)
        chosen = rng.sample(files, min(sample, len(files)))
        bad = []
        for p in chosen:
            try:
                text = p.read_text()
                doc = json.loads(text)
                m = ModeMatrix.from_json(text)
                base_name = doc["name"].split("[", 1)[0]
                spec = build_operator(base_name, m.source)
                fresh = mode_matrix(spec, m.nu, enumerate_basis(m.source, m.max_degree))
                if fresh.to_json() != text:
                    bad.append(p.name)
            except (ValueError, KeyError, TypeError):
                bad.append(p.name)
        return bad

    def purge(self) -> int:
        n = 0
        for p in self.entries():
            p.unlink()
            n += 1
        return n
