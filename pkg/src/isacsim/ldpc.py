"""Rate-1/2 (1944, 972) LDPC encoder and normalized min-sum decoder.

The parity-check matrix is data, not code: it is loaded from an alist-style
text file (the packaged default is the IEEE 802.11n rate-1/2, z = 81
quasi-cyclic matrix). Encoding is systematic; the parity solver
B * p = A * u over GF(2) is precomputed once per matrix and cached, so any
alist with an invertible parity part works unchanged.
"""

import functools
from importlib import resources

import numpy as np

DEFAULT_ALIST = "ldpc_1944_972.alist"


class LdpcCode:
    """Parity-check structure plus decoder settings.

    Attributes: n (block length), k (info bits), h_rows/h_cols (edge
    lists), max_iterations, normalization factor of the min-sum check
    update, and a decoder variant tag.
    """

    def __init__(self, row_idx, col_idx, n, m, max_iterations=50, normalization=0.75):
        self.n = int(n)
        self.m = int(m)
        self.k = self.n - self.m
        self.row_idx = np.asarray(row_idx, dtype=np.int64)
        self.col_idx = np.asarray(col_idx, dtype=np.int64)
        if self.row_idx.shape != self.col_idx.shape:
            raise ValueError("edge index arrays must match")
        self.max_iterations = max_iterations
        self.normalization = normalization
        self.variant = "normalized-min-sum"
        self._parity_map = None
        self._build_check_tables()

    @classmethod
    def from_alist(cls, path, **kwargs):
        tokens = [int(t) for t in open(path, "r", encoding="ascii").read().split()]
        it = iter(tokens)
        n = next(it)
        m = next(it)
        max_col_w = next(it)
        next(it)  # max row weight
        col_w = [next(it) for _ in range(n)]
        [next(it) for _ in range(m)]
        # standard alist pads every index list to the maximum weight with 0s;
        # reduced variants list exactly the weight. Detect by token count.
        remaining = len(tokens) - (4 + n + m)
        padded = remaining != sum(col_w) + sum(col_w)
        rows, cols = [], []
        for j in range(n):
            count = max_col_w if padded else col_w[j]
            for _ in range(count):
                i = next(it)
                if i > 0:
                    rows.append(i - 1)
                    cols.append(j)
        return cls(rows, cols, n, m, **kwargs)

    @classmethod
    def default(cls, **kwargs):
        path = resources.files("isacsim.data") / DEFAULT_ALIST
        with resources.as_file(path) as p:
            return cls.from_alist(p, **kwargs)

    def _build_check_tables(self):
        order = np.lexsort((self.col_idx, self.row_idx))
        rows = self.row_idx[order]
        cols = self.col_idx[order]
        weights = np.bincount(rows, minlength=self.m)
        w_max = int(weights.max())
        nbrs = np.full((self.m, w_max), self.n, dtype=np.int64)  # pad -> sentinel var
        pos = np.zeros(self.m, dtype=np.int64)
        for r, c in zip(rows, cols):
            nbrs[r, pos[r]] = c
            pos[r] += 1
        self._check_nbrs = nbrs
        self._pad = nbrs == self.n

    def dense_h(self):
        h = np.zeros((self.m, self.n), dtype=np.uint8)
        h[self.row_idx, self.col_idx] = 1
        return h

    def _ensure_parity_map(self):
        if self._parity_map is not None:
            return
        h = self.dense_h()
        a = h[:, : self.k]
        aug = np.concatenate([h[:, self.k :], a], axis=1)
        for col in range(self.m):
            piv = col + int(np.argmax(aug[col:, col]))
            if aug[piv, col] == 0:
                raise ValueError("parity part of H is singular; cannot encode systematically")
            if piv != col:
                aug[[col, piv]] = aug[[piv, col]]
            hits = np.nonzero(aug[:, col])[0]
            hits = hits[hits != col]
            aug[hits] ^= aug[col]
        self._parity_map = aug[:, self.m :]

    def encode(self, info):
        """Systematic encoding: codeword = [info, parity], H * c = 0."""
        info = np.asarray(info, dtype=np.uint8)
        if info.size != self.k:
            raise ValueError(f"expected {self.k} info bits, got {info.size}")
        self._ensure_parity_map()
        parity = (self._parity_map @ info) % 2
        return np.concatenate([info, parity.astype(np.uint8)])

    def syndrome(self, bits):
        bits = np.asarray(bits, dtype=np.int64)
        return np.bincount(self.row_idx, weights=bits[self.col_idx], minlength=self.m).astype(np.int64) % 2

    def decode(self, llrs):
        """Normalized min-sum decoding; positive LLR means bit 0.

        Early exit as soon as the hard decisions satisfy every check.
        Returns the k info bits of the best available decision.
        """
        llrs = np.asarray(llrs, dtype=float)
        if llrs.size != self.n:
            raise ValueError(f"expected {self.n} LLRs, got {llrs.size}")
        ext = np.concatenate([llrs, [np.inf]])  # sentinel pad variable
        hard = (llrs < 0).astype(np.uint8)
        if not self.syndrome(hard).any():
            return hard[: self.k]

        nbrs = self._check_nbrs
        v2c = ext[nbrs]
        c2v = np.zeros_like(v2c)
        for _ in range(self.max_iterations):
            mags = np.abs(v2c)
            signs = np.where(v2c < 0, -1.0, 1.0)
            row_sign = np.prod(signs, axis=1, keepdims=True)
            part = np.partition(mags, 1, axis=1)
            min1 = part[:, 0:1]
            min2 = part[:, 1:2]
            is_min = mags == min1
            # exclude exactly one minimum occurrence per row
            first_min = np.cumsum(is_min, axis=1) == 1
            use = np.where(is_min & first_min, min2, min1)
            c2v = self.normalization * row_sign * signs * use
            c2v[self._pad] = 0.0
            totals = llrs + np.bincount(
                nbrs.ravel(), weights=c2v.ravel(), minlength=self.n + 1
            )[: self.n]
            hard = (totals < 0).astype(np.uint8)
            if not self.syndrome(hard).any():
                break
            tot_ext = np.concatenate([totals, [np.inf]])
            v2c = tot_ext[nbrs] - c2v
        return hard[: self.k]


def ldpc_encode(info, code: LdpcCode):
    return code.encode(info)


def ldpc_decode(llrs, code: LdpcCode):
    return code.decode(llrs)


@functools.lru_cache(maxsize=4)
def load_code(path=None):
    """Cached code constructor; None loads the packaged default matrix."""
    return LdpcCode.default() if path is None else LdpcCode.from_alist(path)
