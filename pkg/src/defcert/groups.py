"""A two-parameter metacyclic-flavored group family, by explicit tables.

For an odd prime p and a primitive root a mod p, the full group is the
semidirect product (F_p x F_p) : F_p^* with

    ((x, y), a) * ((x', y'), a') = ((x + a x', y + a^(-1) y'), a a')

so the scalar part acts on the plane by a.(x, y) = (ax, y/a).  The
quotient drops the y coordinate (it kills the normal order-p subgroup
generated by tau).  Distinguished elements: sigma = ((1,0),1),
tau = ((0,1),1), epsilon = ((0,0),a).

Nothing downstream trusts a presentation.  Groups are multiplication
tables; representations carry one matrix per element, produced from
generator matrices through the normal form sigma^x tau^y epsilon^j and
then checked against the whole table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import coeff, flinalg


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def multiplicative_order(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ValueError("0 has no multiplicative order")
    k, x = 1, a
    while x != 1:
        x = x * a % p
        k += 1
    return k


def smallest_primitive_root(p: int) -> int:
    for a in range(2, p):
        if multiplicative_order(a, p) == p - 1:
            return a
    raise ValueError(f"no primitive root mod {p}")


@dataclass(frozen=True)
class GroupElement:
    """One element ((x, y), a); y is always 0 in the quotient."""

    x: int
    y: int
    a: int


class GroupTable:
    """Immutable multiplication table for one group of the family.

    Elements are indexed in lexicographic (x, y, j) order where
    a = a_eps^j, so the identity sits at index 0.  ``mul[g, h]`` is the
    index of the product, ``inv[g]`` of the inverse.  ``sigma``, ``tau``
    and ``eps`` are generator indices; ``tau`` is None in the quotient.
    """

    def __init__(self, p, a_eps, quotient, xs, ys, js, mul, inv,
                 sigma, tau, eps):
        self.p = p
        self.a_eps = a_eps
        self.quotient = quotient
        self.xs = xs
        self.ys = ys
        self.js = js
        self.mul = mul
        self.inv = inv
        self.sigma = sigma
        self.tau = tau
        self.eps = eps
        self.size = len(xs)
        self.identity = 0
        self.avals = pow_table(a_eps, p)[js] if self.size > 1 else np.ones(
            1, dtype=np.int64
        )

    def element(self, i: int) -> GroupElement:
        return GroupElement(int(self.xs[i]), int(self.ys[i]),
                            int(self.avals[i]))

    def find(self, x: int, y: int, a: int) -> int:
        hits = np.nonzero(
            (self.xs == x % self.p)
            & (self.ys == y % self.p)
            & (self.avals == a % self.p)
        )[0]
        if hits.size != 1:
            raise ValueError(f"no element (({x},{y}),{a})")
        return int(hits[0])

    def generator_indices(self) -> dict:
        out = {"sigma": self.sigma, "epsilon": self.eps}
        if self.tau is not None:
            out["tau"] = self.tau
        return out

    def power(self, g: int, k: int) -> int:
        acc, base = self.identity, g
        k = int(k)
        if k < 0:
            base, k = int(self.inv[g]), -k
        while k:
            if k & 1:
                acc = int(self.mul[acc, base])
            base = int(self.mul[base, base])
            k >>= 1
        return acc

    def order_of(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = int(self.mul[x, g])
            k += 1
        return k

    def eps_subgroup(self) -> list:
        """Indices of the cyclic p'-complement generated by epsilon."""
        out = [self.identity]
        g = self.eps
        while g != self.identity:
            out.append(g)
            g = int(self.mul[g, self.eps])
        return sorted(out)


def pow_table(a: int, p: int) -> np.ndarray:
    """a^j mod p for j = 0..p-2."""
    out = np.ones(max(p - 1, 1), dtype=np.int64)
    for j in range(1, p - 1):
        out[j] = out[j - 1] * a % p
    return out


def build_group(p: int, a_eps: int | None = None,
                quotient: bool = False) -> GroupTable:
    """Construct and sanity-check one table of the family.

    a_eps defaults to the smallest primitive root mod p and is validated
    in any case; the scalar coordinate must generate all of F_p^*.
    """
    if not is_prime(p) or p < 3:
        raise ValueError(f"p must be an odd prime, got {p}")
    if a_eps is None:
        a_eps = smallest_primitive_root(p)
    a_eps %= p
    if a_eps == 0:
        raise ValueError("a_eps must be a unit mod p")
    order = multiplicative_order(a_eps, p)
    if order != p - 1:
        raise ValueError(
            f"a_eps={a_eps} has multiplicative order {order} mod {p}, "
            f"need {p - 1}"
        )

    apow = pow_table(a_eps, p)
    dlog = np.zeros(p, dtype=np.int64)
    dlog[apow] = np.arange(p - 1)

    if quotient:
        grid = [(x, 0, j) for x in range(p) for j in range(p - 1)]
    else:
        grid = [(x, y, j) for x in range(p) for y in range(p)
                for j in range(p - 1)]
    xs = np.array([g[0] for g in grid], dtype=np.int64)
    ys = np.array([g[1] for g in grid], dtype=np.int64)
    js = np.array([g[2] for g in grid], dtype=np.int64)
    avals = apow[js]
    ainw = apow[(-js) % (p - 1)]  # a^(-1) per element

    x2 = (xs[:, None] + avals[:, None] * xs[None, :]) % p
    y2 = (ys[:, None] + ainw[:, None] * ys[None, :]) % p
    j2 = (js[:, None] + js[None, :]) % (p - 1)
    if quotient:
        mul = x2 * (p - 1) + j2
    else:
        mul = (x2 * p + y2) * (p - 1) + j2

    xinv = (-ainw * xs) % p
    yinv = (-avals * ys) % p
    jinv = (-js) % (p - 1)
    if quotient:
        inv = xinv * (p - 1) + jinv
    else:
        inv = (xinv * p + yinv) * (p - 1) + jinv

    n = len(grid)
    table = GroupTable(p, a_eps, quotient, xs, ys, js, mul, inv,
                       sigma=int(np.nonzero((xs == 1) & (ys == 0)
                                            & (js == 0))[0][0]),
                       tau=None if quotient else int(
                           np.nonzero((xs == 0) & (ys == 1)
                                      & (js == 0))[0][0]),
                       eps=int(np.nonzero((xs == 0) & (ys == 0)
                                          & (js == 1))[0][0]))

    expect = p * (p - 1) if quotient else p * p * (p - 1)
    if n != expect:
        raise ValueError("element count mismatch")
    ar = np.arange(n)
    if not (np.array_equal(mul[0], ar) and np.array_equal(mul[:, 0], ar)):
        raise ValueError("identity row or column broken")
    if not np.array_equal(mul[ar, inv], np.zeros(n, dtype=np.int64)):
        raise ValueError("inverse table broken")
    rng = np.random.default_rng(0)
    g, h, k = rng.integers(0, n, size=(3, 256))
    if not np.array_equal(mul[mul[g, h], k], mul[g, mul[h, k]]):
        raise ValueError("associativity spot check failed")
    return table


def trivial_group(p: int) -> GroupTable:
    """One-element table; the characteristic p still tags the modules."""
    z = np.zeros(1, dtype=np.int64)
    return GroupTable(p, 1, False, z, z, z,
                      mul=np.zeros((1, 1), dtype=np.int64), inv=z.copy(),
                      sigma=0, tau=0, eps=0)


def quotient_projection(full: GroupTable, quot: GroupTable) -> np.ndarray:
    """Index map realizing quot as full modulo the tau subgroup.

    Verifies, on every pair, that dropping y is a surjective homomorphism
    whose kernel is exactly <tau>; by the first isomorphism theorem that
    certifies quot ~ full / <tau>.
    """
    if full.quotient or not quot.quotient:
        raise ValueError("need (full, quotient) tables in that order")
    if (full.p, full.a_eps) != (quot.p, quot.a_eps):
        raise ValueError("tables built from different parameters")
    p = full.p
    proj = full.xs * (p - 1) + full.js
    if not np.array_equal(
        proj[full.mul], quot.mul[np.ix_(proj, proj)]
    ):
        raise ValueError("projection is not a homomorphism")
    if set(np.nonzero(proj == quot.identity)[0]) != {
        full.find(0, y, 1) for y in range(p)
    }:
        raise ValueError("projection kernel is not the tau subgroup")
    if len(set(proj.tolist())) != quot.size:
        raise ValueError("projection is not onto")
    return proj


# ---------------------------------------------------------------------------
# representations


class GroupRep:
    """One matrix per group element over a coefficient ring.

    ``mats`` has shape (size, d, d, levels) with the level axis matching
    the ring descriptor.  Construction from generator matrices goes
    through the normal form sigma^x tau^y epsilon^j and then checks
    rho(g) rho(h) = rho(g h) on the full multiplication table; there is
    deliberately no shortcut through relators.
    """

    def __init__(self, table: GroupTable, ring: coeff.RingDescriptor,
                 mats: np.ndarray, check: bool = True):
        mats = np.asarray(mats, dtype=np.int64)
        if mats.shape[0] != table.size or mats.shape[3] != ring.levels:
            raise ValueError("matrix stack shape does not match table/ring")
        moduli = np.array(ring.moduli, dtype=np.int64)
        self.table = table
        self.ring = ring
        self.mats = mats % moduli
        self.dim = mats.shape[1]
        if check:
            bad = self.check_table()
            if bad:
                g, h = bad[0]
                raise ValueError(
                    f"not a homomorphism: rho(g)rho(h) != rho(gh) at "
                    f"pair ({g}, {h}) and {len(bad) - 1} more"
                )

    @classmethod
    def from_generators(cls, table: GroupTable, ring: coeff.RingDescriptor,
                        gen_mats: dict, check: bool = True) -> "GroupRep":
        need = {"sigma", "epsilon"} | (
            set() if table.tau is None else {"tau"}
        )
        if set(gen_mats) - {"sigma", "tau", "epsilon"} or need - set(gen_mats):
            raise ValueError(f"generator matrices must be keyed by {need}")
        p = table.p
        norm = {k: _as_levels(v, ring) for k, v in gen_mats.items()}
        d = norm["sigma"].shape[1]
        spow = _power_list(norm["sigma"], p, ring)
        epow = _power_list(norm["epsilon"], p - 1, ring)
        tpow = (
            _power_list(norm["tau"], p, ring) if "tau" in norm else None
        )
        mats = np.empty((table.size, d, d, ring.levels), dtype=np.int64)
        for i in range(table.size):
            m = spow[table.xs[i]]
            if tpow is not None and table.ys[i]:
                m = _level_matmul(m, tpow[table.ys[i]], ring)
            if table.js[i]:
                m = _level_matmul(m, epow[table.js[i]], ring)
            mats[i] = m
        return cls(table, ring, mats, check=check)

    def matrix(self, i: int) -> coeff.Matrix:
        return coeff.Matrix(self.ring, self.mats[i])

    def generator_matrix(self, name: str) -> np.ndarray:
        idx = self.table.generator_indices()[name]
        return self.mats[idx]

    def residue_matrix(self, i: int) -> np.ndarray:
        return self.mats[i, :, :, 0] % self.ring.p

    def check_table(self) -> list:
        """All (g, h) with rho(g)rho(h) != rho(gh); empty means verified."""
        t, ring = self.table, self.ring
        moduli = ring.moduli
        L = ring.levels
        a = self.mats
        bad = []
        for g in range(t.size):
            lhs = _convolve_stack(a[g], a, moduli, L)
            rhs = a[t.mul[g]]
            neq = np.nonzero(
                np.any(lhs != rhs, axis=(1, 2, 3))
            )[0]
            bad.extend((g, int(h)) for h in neq)
        return bad

    def convert(self, target: coeff.RingDescriptor) -> "GroupRep":
        """Reduce along a legal ring surjection (levelwise)."""
        coeff._convert_levels(self.ring, target, (0,) * self.ring.levels)
        md = np.array(target.moduli, dtype=np.int64)
        return GroupRep(self.table, target,
                        self.mats[:, :, :, : target.levels] % md,
                        check=False)


def _as_levels(m, ring: coeff.RingDescriptor) -> np.ndarray:
    if isinstance(m, coeff.Matrix):
        if m.desc != ring:
            raise coeff.DescriptorMismatch(f"{m.desc} vs {ring}")
        return m.arr.copy()
    m = np.asarray(m, dtype=np.int64)
    if m.ndim == 2:
        out = np.zeros(m.shape + (ring.levels,), dtype=np.int64)
        out[:, :, 0] = m
        m = out
    if m.ndim != 3 or m.shape[2] != ring.levels:
        raise ValueError("generator matrix has wrong shape")
    return m % np.array(ring.moduli, dtype=np.int64)


def _level_matmul(a: np.ndarray, b: np.ndarray,
                  ring: coeff.RingDescriptor) -> np.ndarray:
    av = [a[:, :, i] for i in range(ring.levels)]
    bv = [b[:, :, i] for i in range(ring.levels)]
    out = coeff.convolve_levels(ring.moduli, av, bv, np.matmul)
    return np.stack(out, axis=-1)


def _convolve_stack(a: np.ndarray, stack: np.ndarray, moduli,
                    L: int) -> np.ndarray:
    """a (d,d,L) times every matrix of stack (n,d,d,L), level-convolved."""
    out = np.empty_like(stack)
    for l in range(L):
        acc = None
        for i in range(l + 1):
            term = np.matmul(a[:, :, i], stack[:, :, :, l - i])
            acc = term if acc is None else acc + term
        out[:, :, :, l] = acc % moduli[l]
    return out


def _power_list(m: np.ndarray, upto: int,
                ring: coeff.RingDescriptor) -> list:
    d = m.shape[0]
    eye = np.zeros((d, d, ring.levels), dtype=np.int64)
    eye[np.arange(d), np.arange(d), 0] = 1
    out = [eye]
    for _ in range(upto - 1):
        out.append(_level_matmul(out[-1], m, ring))
    return out


def uniserial_representation(p: int, a_eps: int | None = None,
                             table: GroupTable | None = None) -> GroupRep:
    """The faithful uniserial (p-1)-dimensional quotient-group module.

    sigma acts by the truncated exponential of a single Jordan block: the
    k-th superdiagonal carries the inverse of k factorial.  epsilon acts
    by diag(a^(p-2), ..., a, 1).  Both facts force the conjugation
    relation epsilon sigma epsilon^(-1) = sigma^a entrywise, and the
    resulting module is uniserial with descending simple factors in
    cyclic order starting from the trivial one.

    Pass an existing quotient table to keep the result's modules
    comparable with modules already living over it.
    """
    if table is None:
        table = build_group(p, a_eps, quotient=True)
    elif (
        not table.quotient
        or table.p != p
        or (a_eps is not None and table.a_eps != a_eps)
    ):
        raise ValueError("supplied table does not match the parameters")
    a = table.a_eps
    d = p - 1
    s = np.zeros((d, d), dtype=np.int64)
    band = 1
    for k in range(d):
        if k:
            band = band * k % p
        val = pow(band, -1, p)
        idx = np.arange(d - k)
        s[idx, idx + k] = val
    e = np.diag([pow(a, p - 2 - i, p) for i in range(d)]).astype(np.int64)
    return GroupRep.from_generators(
        table, coeff.prime_field(p), {"sigma": s, "epsilon": e}
    )


def inflate(rep: GroupRep, full: GroupTable) -> GroupRep:
    """Pull a quotient-group representation back to the full group.

    tau goes to the identity; the result is rebuilt from generators and
    re-verified on the full table rather than transported along the
    projection map.
    """
    if not rep.table.quotient:
        raise ValueError("can only inflate from the quotient")
    if (full.p, full.a_eps) != (rep.table.p, rep.table.a_eps):
        raise ValueError("parameter mismatch between tables")
    d = rep.dim
    eye = np.zeros((d, d, rep.ring.levels), dtype=np.int64)
    eye[np.arange(d), np.arange(d), 0] = 1
    return GroupRep.from_generators(
        full, rep.ring,
        {
            "sigma": rep.generator_matrix("sigma"),
            "tau": eye,
            "epsilon": rep.generator_matrix("epsilon"),
        },
    )


# ---------------------------------------------------------------------------
# modules over the group algebra

from . import fdmod  # noqa: E402  (fdmod must not import groups)


class GroupAlgebra:
    """fdmod-protocol handle for F_p[table].

    Single grading block; simple labels are the exponents i of the
    scalar-coordinate characters epsilon -> a^i.  Module validation uses
    the six defining relations of the iterated semidirect product
    (sigma^p, tau^p, the commutator, epsilon^(p-1), and the two
    conjugation rules); these present a group of order p^2 (p-1), so
    generator matrices satisfying them carry a genuine group action.
    Representations on explicit tables never take that shortcut.
    """

    kind = "group"

    def __init__(self, table: GroupTable):
        self.table = table
        self.p = table.p
        self.grading_labels = ("*",)
        self.simple_labels = tuple(range(table.p - 1))
        self.generators = (
            ("sigma", "epsilon") if table.tau is None
            else ("sigma", "tau", "epsilon")
        )
        self._proj_cache = {}
        self._cosets = None
        self._pow_cache = {}

    def gen_block(self, name):
        return None

    def hom_split(self):
        uni = tuple(n for n in self.generators if n != "epsilon")
        return uni, "epsilon"

    def relation_items(self):
        p, a = self.p, self.table.a_eps
        s, t, e = ("sigma",), ("tau",), ("epsilon",)
        items = [
            ("group:sigma^p=1", [(1, s * p), (-1, ())]),
            ("group:epsilon^(p-1)=1", [(1, e * (p - 1)), (-1, ())]),
            ("group:eps sigma=sigma^a eps", [(1, e + s), (-1, s * a + e)]),
        ]
        if self.table.tau is not None:
            ainv = pow(a, -1, p) if a != 1 else 1
            items += [
                ("group:tau^p=1", [(1, t * p), (-1, ())]),
                ("group:sigma tau=tau sigma", [(1, s + t), (-1, t + s)]),
                ("group:eps tau=tau^(1/a) eps",
                 [(1, e + t), (-1, t * ainv + e)]),
            ]
        return items

    def simple_module(self, label):
        return simple_module(self.table, label)

    def projective_module(self, label):
        if label not in self._proj_cache:
            H, W = eps_character(self.table, label)
            self._proj_cache[label] = induce(H, W, self.table)
        return self._proj_cache[label]

    def _eigen_basis(self, M, label):
        val = pow(self.table.a_eps, label, self.p)
        d = M.dim
        shifted = (M.mats["epsilon"] - val * np.eye(d, dtype=np.int64)) % self.p
        return flinalg.nullspace(shifted, self.p)

    def module_dim_vector(self, M):
        out = {}
        for i in self.simple_labels:
            k = self._eigen_basis(M, i).shape[1]
            if k:
                out[i] = k
        if sum(out.values()) != M.dim:
            raise ValueError("scalar generator does not act semisimply")
        return out

    def radical_image_columns(self, M):
        # rad = augmentation ideal of the normal p-Sylow; over modules
        # that is the span of (u - 1)M for the unipotent generators u.
        uni, _ = self.hom_split()
        d = M.dim
        eye = np.eye(d, dtype=np.int64)
        cols = np.concatenate(
            [(M.mats[u] - eye) % self.p for u in uni], axis=1
        )
        return flinalg.col_space_basis(cols, self.p)

    def socle_columns(self, M):
        uni, _ = self.hom_split()
        d = M.dim
        eye = np.eye(d, dtype=np.int64)
        stacked = np.concatenate(
            [(M.mats[u] - eye) % self.p for u in uni], axis=0
        )
        return flinalg.nullspace(stacked, self.p)

    def component_vectors(self, N, label):
        basis = self._eigen_basis(N, label)
        return [basis[:, k] for k in range(basis.shape[1])]

    def top_pick(self, M):
        """Eigenvector generators of M/rad M, one per top summand.

        The scalar generator is semisimple, so each eigenspace of M maps
        onto the matching eigenspace of the top; greedy rank growth picks
        eigenvector lifts, which is exactly what yoneda_columns needs.
        """
        acc = self.radical_image_columns(M)
        base_rank = flinalg.rank(acc, self.p)
        picks = []
        for label in self.simple_labels:
            basis = self._eigen_basis(M, label)
            for k in range(basis.shape[1]):
                cand = np.concatenate([acc, basis[:, k:k + 1]], axis=1)
                r = flinalg.rank(cand, self.p)
                if r > base_rank:
                    acc, base_rank = cand, r
                    picks.append((label, basis[:, k].copy()))
        return picks

    def _eps_cosets(self):
        if self._cosets is None:
            H = self.table.eps_subgroup()
            self._cosets = left_cosets(self.table, H)
        return self._cosets

    def element_action(self, M, g: int) -> np.ndarray:
        """Action matrix of element g on M, from cached generator powers."""
        key = id(M)
        if key not in self._pow_cache:
            p = self.p
            d = M.dim
            eye = np.eye(d, dtype=np.int64)
            pows = {}
            for name in self.generators:
                lst = [eye]
                top = p - 1 if name == "epsilon" else p
                for _ in range(top - 1):
                    lst.append(
                        flinalg.matmul_mod(lst[-1], M.mats[name], p)
                    )
                pows[name] = lst
            self._pow_cache[key] = (M, pows)
        _, pows = self._pow_cache[key]
        t = self.table
        m = pows["sigma"][t.xs[g]]
        if t.tau is not None and t.ys[g]:
            m = flinalg.matmul_mod(m, pows["tau"][t.ys[g]], self.p)
        if t.js[g]:
            m = flinalg.matmul_mod(m, pows["epsilon"][t.js[g]], self.p)
        return m

    def yoneda_columns(self, label, N, x):
        """Hom(P_label, N) element sending the coset basis through x.

        Well-defined when x lies in the a^label eigenspace of the scalar
        generator (Frobenius reciprocity); column c is rho_N(rep_c) x.
        """
        reps, _, _ = self._eps_cosets()
        x = np.asarray(x, dtype=np.int64) % self.p
        out = np.empty((N.dim, len(reps)), dtype=np.int64)
        for c, g in enumerate(reps):
            out[:, c] = self.element_action(N, g) @ x % self.p
        return out

    def section_label_dims_quotient(self, M, upper, lower):
        """Simple multiplicities of span(upper)/span(lower).

        Both spans must be stable under the scalar generator (radical
        layers and socles are); the induced action is diagonalizable, so
        the section splits into character eigenspaces.
        """
        p = self.p
        low = flinalg.col_space_basis(lower, p) if lower.size else np.zeros(
            (M.dim, 0), dtype=np.int64
        )
        acc = low
        base_rank = flinalg.rank(acc, p)
        chosen = []
        for k in range(upper.shape[1]):
            cand = np.concatenate([acc, upper[:, k:k + 1]], axis=1)
            r = flinalg.rank(cand, p)
            if r > base_rank:
                acc, base_rank = cand, r
                chosen.append(upper[:, k])
        if not chosen:
            return {}
        C = np.column_stack(chosen)
        B = np.concatenate([low, C], axis=1)
        img = flinalg.matmul_mod(M.mats["epsilon"], C, p)
        X = flinalg.solve(B, img, p)
        if X is None:
            raise ValueError("section is not stable under the scalar part")
        Q = X[low.shape[1]:, :]
        out = {}
        found = 0
        for i in self.simple_labels:
            val = pow(self.table.a_eps, i, p)
            ker = flinalg.nullspace(
                (Q - val * np.eye(Q.shape[0], dtype=np.int64)) % p, p
            )
            if ker.shape[1]:
                out[i] = ker.shape[1]
                found += ker.shape[1]
        if found != len(chosen):
            raise ValueError("section action failed to diagonalize")
        return out


_HANDLES: dict = {}


def group_algebra(table: GroupTable) -> GroupAlgebra:
    """One shared handle per table, so modules stay comparable."""
    key = id(table)
    if key not in _HANDLES:
        _HANDLES[key] = (table, GroupAlgebra(table))
    return _HANDLES[key][1]


def simple_module(table: GroupTable, i: int) -> fdmod.FdModule:
    """The character module where epsilon scales by a^i; sigma, tau fix."""
    p = table.p
    if not 0 <= i <= p - 2:
        raise ValueError(f"simple index {i} outside 0..{p - 2}")
    alg = group_algebra(table)
    one = np.ones((1, 1), dtype=np.int64)
    mats = {"sigma": one.copy(),
            "epsilon": one * pow(table.a_eps, i, p) % p}
    if table.tau is not None:
        mats["tau"] = one.copy()
    return fdmod.FdModule(alg, np.zeros(1, dtype=np.int64), mats)


def eps_character(table: GroupTable, i: int):
    """(subgroup, action) input for inducing the i-th scalar character."""
    p = table.p
    if not 0 <= i <= p - 2:
        raise ValueError(f"character index {i} outside 0..{p - 2}")
    H = table.eps_subgroup()
    W = {}
    for h in H:
        W[h] = np.array(
            [[pow(table.a_eps, i * int(table.js[h]), p)]], dtype=np.int64
        )
    return H, W


def left_cosets(table: GroupTable, H: list):
    """(reps, coset_of, h_of) for the left cosets gH, reps ascending."""
    Hs = sorted(set(int(h) for h in H))
    n = table.size
    coset_of = np.full(n, -1, dtype=np.int64)
    h_of = np.full(n, -1, dtype=np.int64)
    reps = []
    for g in range(n):
        if coset_of[g] >= 0:
            continue
        c = len(reps)
        reps.append(g)
        for h in Hs:
            u = int(table.mul[g, h])
            if coset_of[u] >= 0:
                raise ValueError("coset overlap; H is not a subgroup")
            coset_of[u] = c
            h_of[u] = h
    return reps, coset_of, h_of


def induce(H: list, W: dict, table: GroupTable) -> fdmod.FdModule:
    """Coset-basis induced module of the subgroup action W up to table.

    H is a list of element indices, W maps each of them to its action
    matrix over F_p.  The result has dimension [G : H] * dim W.  When H
    is the scalar-generator subgroup this produces the projective covers
    of the simples, because inducing from a p'-subgroup preserves
    projectivity; their uniserial shape is checked elsewhere, not assumed.
    """
    p = table.p
    Hs = sorted(set(int(h) for h in H))
    if table.identity not in Hs:
        raise ValueError("H does not contain the identity")
    Hset = set(Hs)
    for h1 in Hs:
        for h2 in Hs:
            if int(table.mul[h1, h2]) not in Hset:
                raise ValueError("H is not closed under multiplication")
    if set(W) != Hset:
        raise ValueError("W must assign a matrix to each element of H")
    Wm = {h: np.asarray(W[h], dtype=np.int64) % p for h in Hs}
    dW = Wm[Hs[0]].shape[0]
    for h in Hs:
        if Wm[h].shape != (dW, dW):
            raise ValueError("mixed matrix sizes in W")
    for h1 in Hs:
        for h2 in Hs:
            prod = flinalg.matmul_mod(Wm[h1], Wm[h2], p)
            if not np.array_equal(prod, Wm[int(table.mul[h1, h2])]):
                raise ValueError("W is not a representation of H")

    reps, coset_of, h_of = left_cosets(table, Hs)
    nc = len(reps)
    alg = group_algebra(table)
    mats = {}
    for name, s in alg.table.generator_indices().items():
        m = np.zeros((nc * dW, nc * dW), dtype=np.int64)
        for c, gc in enumerate(reps):
            u = int(table.mul[s, gc])
            c2 = int(coset_of[u])
            h = int(h_of[u])
            m[c2 * dW:(c2 + 1) * dW, c * dW:(c + 1) * dW] = Wm[h]
        mats[name] = m
    return fdmod.FdModule(alg, np.zeros(nc * dW, dtype=np.int64), mats)


def rep_to_module(rep: GroupRep) -> fdmod.FdModule:
    """Forget the table: the same action as a validated FdModule."""
    if rep.ring.kind != "prime_field":
        raise ValueError("only residue representations become modules")
    alg = group_algebra(rep.table)
    mats = {
        name: rep.generator_matrix(name)[:, :, 0] % rep.ring.p
        for name in alg.generators
    }
    return fdmod.FdModule(alg, np.zeros(rep.dim, dtype=np.int64), mats)


def module_rep(table: GroupTable, M: fdmod.FdModule) -> GroupRep:
    """Expand a module to a full-table-verified representation."""
    if M.algebra is not group_algebra(table):
        raise ValueError("module does not live over this table")
    return GroupRep.from_generators(
        table, coeff.prime_field(table.p),
        {name: M.mats[name] for name in M.algebra.generators},
    )


def conjugation_module(rho: GroupRep) -> fdmod.FdModule:
    """Matrix space with the action f -> rho(g) f rho(g)^(-1).

    Row-major flattening, so the generator action is kron(A, inv(A).T).
    Dimension (dim rho)^2.
    """
    if rho.ring.kind != "prime_field":
        raise ValueError("conjugation module needs a residue representation")
    p = rho.ring.p
    t = rho.table
    alg = group_algebra(t)
    mats = {}
    for name, g in t.generator_indices().items():
        A = rho.residue_matrix(g)
        Ainv = rho.residue_matrix(int(t.inv[g]))
        mats[name] = np.kron(A, Ainv.T) % p
    return fdmod.FdModule(
        alg, np.zeros(rho.dim * rho.dim, dtype=np.int64), mats
    )


# ---------------------------------------------------------------------------
# first cohomology by cocycles


@dataclass
class H1Result:
    dim: int
    cocycle_dim: int
    coboundary_dim: int
    representatives: list  # one (size, dim M) array per class generator


def h1_cocycles(table: GroupTable, M: fdmod.FdModule) -> H1Result:
    """dim Z^1 - dim B^1 for the action of table on M, with class reps.

    A cocycle is determined by its generator values, so the solve runs
    over those parameters; every surviving basis cocycle is then checked
    against d(gh) = d(g) + g.d(h) for all |G|^2 pairs, which keeps the
    computed dimension honest in both directions (the parameter system
    bounds it above, the verified basis below).
    """
    rep = module_rep(table, M)
    p = table.p
    n = table.size
    m = M.dim
    rho = rep.mats[:, :, :, 0] % p

    gen_idx = []
    for g in (table.sigma, table.tau, table.eps):
        if g is not None and g not in gen_idx:
            gen_idx.append(g)
    npar = len(gen_idx) * m
    sel = {}
    for k, g in enumerate(gen_idx):
        u = np.zeros((m, npar), dtype=np.int64)
        u[:, k * m:(k + 1) * m] = np.eye(m, dtype=np.int64)
        sel[g] = u

    # d(parent * s) = d(parent) + rho(parent) d(s); the (x, y, j) index
    # order makes every parent index smaller, so one forward pass fills D.
    D = np.zeros((n, m, npar), dtype=np.int64)
    for i in range(1, n):
        x, y, j = int(table.xs[i]), int(table.ys[i]), int(table.js[i])
        if j:
            par = i - 1
            s = table.eps
        elif y:
            par = table.find(x, y - 1, 1)
            s = table.tau
        else:
            par = table.find(x - 1, 0, 1)
            s = table.sigma
        D[i] = (D[par] + rho[par] @ sel[s]) % p

    rows = []
    for s in dict.fromkeys(gen_idx):
        lhs = D[table.mul[:, s]]
        rhs = (D + np.matmul(rho, sel[s])) % p
        rows.append(((lhs - rhs) % p).reshape(n * m, npar))
    system = np.concatenate(rows, axis=0)
    zpar = flinalg.nullspace(system, p)
    zdim = zpar.shape[1]

    if zdim:
        DS = np.einsum("gmp,pk->gmk", D, zpar) % p
        for g in range(n):
            lhs = DS[table.mul[g]]
            rhs = (DS[g][None, :, :] + np.matmul(rho[g], DS)) % p
            if np.any(lhs != rhs):
                raise RuntimeError("verified cocycle basis failed the table")
    else:
        DS = np.zeros((n, m, 0), dtype=np.int64)

    # coboundaries, written in the same generator-value parameters
    bcols = np.concatenate(
        [(rho[s] - np.eye(m, dtype=np.int64)) % p for s in gen_idx], axis=0
    )
    bdim = flinalg.rank(bcols, p)
    if flinalg.rank(np.concatenate([zpar, bcols], axis=1), p) != zdim:
        raise RuntimeError("coboundaries escaped the cocycle space")

    reps_out = []
    acc = bcols
    base_rank = bdim
    for k in range(zdim):
        cand = np.concatenate([acc, zpar[:, k:k + 1]], axis=1)
        r = flinalg.rank(cand, p)
        if r > base_rank:
            acc, base_rank = cand, r
            reps_out.append(DS[:, :, k].copy())
    dim = zdim - bdim
    assert len(reps_out) == dim
    return H1Result(dim, zdim, bdim, reps_out)
