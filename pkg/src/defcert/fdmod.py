"""Finite-dimensional modules over presented algebras, with Hom and Ext.

An algebra handle is either a QuiverAlgebra (wrapping a completed rewriting
system) or a group-algebra handle with the same duck-typed surface (see
groups module).  A handle provides:

  p, kind, grading_labels, simple_labels, generators
  gen_block(name)            -> (src_label, tgt_label) or None
  relation_items()           -> [(id, [(coeff, word), ...]), ...]
  projective_module(label)   -> FdModule (cached per handle)
  simple_module(label)       -> FdModule
  radical_image_columns(M)   -> int64 columns spanning rad*M
  top_pick(M)                -> [(label, generator vector), ...]
  yoneda_columns(label, N, x)-> action columns of Hom(P_label, N) element x
  section_label_dims(M, cols, action) -> {label: multiplicity}
  hom_split()                -> None, or (unipotent gen names, p'-gen name)

All modules are graded by grading_labels via block_of; group-algebra
modules use a single block.  Words act leftmost-last, so ``rho(word)`` is
the matrix product taken in written order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import flinalg
from .quiver import CompletedSystem, relation_str


class RelationViolated(ValueError):
    def __init__(self, relation_id, position, value=None):
        self.relation_id = relation_id
        self.position = position
        self.value = value
        super().__init__(
            f"relation {relation_id} violated at entry {position}"
            + (f" (value {value})" if value is not None else "")
        )


@dataclass
class ValidationReport:
    ok: bool
    violations: list

    def raise_if_invalid(self):
        if not self.ok:
            raise self.violations[0]


class FdModule:
    """Module given by one action matrix per algebra generator.

    block_of[i] is the index into algebra.grading_labels of basis vector i.
    Idempotents are not stored; they are the 0/1 diagonal projectors of the
    grading, which validate_module checks against any fixture-supplied
    idempotent matrices before construction.
    """

    def __init__(self, algebra, block_of, mats, check=True):
        self.algebra = algebra
        self.block_of = np.asarray(block_of, dtype=np.int64)
        self.dim = int(self.block_of.shape[0])
        p = algebra.p
        self.mats = {}
        for name in algebra.generators:
            a = np.asarray(mats.get(name, np.zeros((self.dim, self.dim))),
                           dtype=np.int64) % p
            if a.shape != (self.dim, self.dim):
                raise ValueError(f"matrix for {name} has shape {a.shape}")
            a.flags.writeable = False
            self.mats[name] = a
        if check and self.dim and not validate_module(self).ok:
            validate_module(self).raise_if_invalid()

    @property
    def p(self):
        return self.algebra.p

    def dimension_vector(self):
        """Per-simple dims: block sizes (quiver) or eigenspace dims (group)."""
        return self.algebra.module_dim_vector(self)

    def block_indices(self, label_idx):
        return np.nonzero(self.block_of == label_idx)[0]

    def gen(self, name):
        return self.mats[name]

    def word_matrix(self, word):
        out = np.eye(self.dim, dtype=np.int64)
        for name in word:
            out = flinalg.matmul_mod(out, self.mats[name], self.p)
        return out

    def idempotent_matrix(self, label):
        idx = list(self.algebra.grading_labels).index(label)
        d = np.where(self.block_of == idx, 1, 0).astype(np.int64)
        return np.diag(d)

    def __repr__(self):
        return f"FdModule(dim={self.dim}, algebra={self.algebra.kind})"


def zero_module(algebra):
    return FdModule(algebra, np.zeros(0, dtype=np.int64), {}, check=False)


def direct_sum(modules):
    if not modules:
        raise ValueError("empty direct sum")
    alg = modules[0].algebra
    if any(m.algebra is not alg for m in modules):
        raise ValueError("direct sum across different algebra handles")
    block_of = np.concatenate([m.block_of for m in modules])
    mats = {}
    for name in alg.generators:
        blocks = [m.mats[name] for m in modules]
        n = sum(b.shape[0] for b in blocks)
        out = np.zeros((n, n), dtype=np.int64)
        at = 0
        for b in blocks:
            k = b.shape[0]
            out[at : at + k, at : at + k] = b
            at += k
        mats[name] = out
    return FdModule(alg, block_of, mats, check=False)


# ---------------------------------------------------------------------------
# validation


def validate_module(M: FdModule) -> ValidationReport:
    """Check grading blocks and every defining relation of the algebra."""
    alg = M.algebra
    p = alg.p
    violations = []
    labels = list(alg.grading_labels)
    for name in alg.generators:
        a = M.mats[name]
        if np.any(a < 0) or np.any(a >= p):
            violations.append(RelationViolated(f"range:{name}", (0, 0)))
            continue
        blk = alg.gen_block(name)
        if blk is None:
            continue
        src, tgt = (labels.index(blk[0]), labels.index(blk[1]))
        bad = a.copy()
        rows = M.block_of == tgt
        cols = M.block_of == src
        bad[np.ix_(rows, cols)] = 0
        if np.any(bad):
            pos = np.argwhere(bad)[0]
            violations.append(
                RelationViolated(f"grading:{name}", tuple(int(x) for x in pos))
            )
    for rel_id, combo in alg.relation_items():
        acc = np.zeros((M.dim, M.dim), dtype=np.int64)
        for coeff, word in combo:
            acc = (acc + coeff * M.word_matrix(word)) % p
        if np.any(acc):
            pos = np.argwhere(acc)[0]
            violations.append(
                RelationViolated(rel_id, tuple(int(x) for x in pos),
                                 int(acc[pos[0], pos[1]]))
            )
    return ValidationReport(not violations, violations)


def module_from_action_matrices(algebra, idempotent_mats, gen_mats):
    """Build a module from explicit idempotent + generator matrices.

    The idempotent matrices must be 0/1 diagonal projectors, pairwise
    orthogonal and summing to the identity; they define the grading.
    """
    dims = {m.shape[0] for m in idempotent_mats.values()}
    if len(dims) != 1:
        raise ValueError("idempotent matrices of mixed size")
    n = dims.pop()
    block_of = np.full(n, -1, dtype=np.int64)
    labels = list(algebra.grading_labels)
    for label, mat in idempotent_mats.items():
        mat = np.asarray(mat, dtype=np.int64) % algebra.p
        if np.any(mat != np.diag(np.diagonal(mat))) or not set(
            np.diagonal(mat)
        ) <= {0, 1}:
            raise RelationViolated(f"idempotent:{label}", (0, 0))
        for i in np.nonzero(np.diagonal(mat))[0]:
            if block_of[i] != -1:
                raise RelationViolated(f"idempotent:{label}", (int(i), int(i)))
            block_of[i] = labels.index(label)
    if np.any(block_of == -1):
        raise RelationViolated("idempotent:sum", (0, 0))
    return FdModule(algebra, block_of, gen_mats)


# ---------------------------------------------------------------------------
# quiver-quotient algebra handle


class QuiverAlgebra:
    kind = "quiver"

    def __init__(self, system: CompletedSystem):
        self.system = system
        self.p = system.spec.p
        self.grading_labels = tuple(system.spec.vertices)
        self.simple_labels = self.grading_labels
        self.generators = tuple(system.spec.arrow_names)
        self._proj_cache = {}

    def gen_block(self, name):
        return self.system.spec.arrows[name]

    def relation_items(self):
        out = []
        for i, rel in enumerate(self.system.spec.relations):
            rid = f"rel[{i}]: {relation_str(self.system.spec, rel)}"
            out.append((rid, [(c, w) for w, c in rel.items()]))
        return out

    def projective_module(self, label):
        if label not in self._proj_cache:
            self._proj_cache[label] = projective_from_system(self.system, label)
        return self._proj_cache[label]

    def simple_module(self, label):
        idx = list(self.grading_labels).index(label)
        return FdModule(self, np.array([idx]), {}, check=False)

    def module_dim_vector(self, M):
        return {
            v: int(np.sum(M.block_of == i))
            for i, v in enumerate(self.grading_labels)
        }

    def radical_image_columns(self, M):
        cols = [np.zeros((M.dim, 0), dtype=np.int64)]
        for name in self.generators:
            a = M.mats[name]
            if np.any(a):
                cols.append(a)
        stacked = np.concatenate(cols, axis=1)
        return flinalg.col_space_basis(stacked, self.p)

    def top_pick(self, M):
        """Exact-eigen generators of M/rad M: complement indices per block."""
        rad = self.radical_image_columns(M)
        picks = []
        for i, label in enumerate(self.grading_labels):
            idx = M.block_indices(i)
            if idx.size == 0:
                continue
            sub = rad[idx, :]
            aug = np.concatenate([sub, np.eye(idx.size, dtype=np.int64)], axis=1)
            _, pivots = flinalg.rref(aug, self.p)
            for pv in pivots:
                if pv >= sub.shape[1]:
                    u = np.zeros(M.dim, dtype=np.int64)
                    u[idx[pv - sub.shape[1]]] = 1
                    picks.append((label, u))
        return picks

    def yoneda_columns(self, label, N, x):
        """Columns of the Hom(P_label, N) element sending e_label to x."""
        sysm = self.system
        words = sysm.basis_by_source[label]
        pos = {w: i for i, w in enumerate(words)}
        out = np.zeros((N.dim, len(words)), dtype=np.int64)
        vals = {(): np.asarray(x, dtype=np.int64) % self.p}
        for w in words:
            if w == ():
                out[:, pos[w]] = vals[()]
                continue
            parent = w[1:]
            name = sysm.spec.arrow_names[w[0]]
            v = flinalg.matmul_mod(
                N.mats[name], vals[parent].reshape(-1, 1), self.p
            ).ravel()
            vals[w] = v
            out[:, pos[w]] = v
        return out

    def hom_split(self):
        return None


def projective_from_system(system: CompletedSystem, v):
    """Lambda * e_v on the irreducible-word basis with source v."""
    if v not in system.spec.vertices:
        raise ValueError(f"unknown vertex {v!r}")
    handle = _handle_for(system)
    words = system.basis_by_source[v]
    pos = {w: i for i, w in enumerate(words)}
    spec = system.spec
    labels = list(spec.vertices)
    block_of = []
    for w in words:
        tgt = v if not w else spec.target(spec.arrow_names[w[0]])
        block_of.append(labels.index(tgt))
    mats = {}
    for name in spec.arrow_names:
        ai = spec.arrow_index[name]
        src = spec.source(name)
        m = np.zeros((len(words), len(words)), dtype=np.int64)
        for w in words:
            tgt_w = v if not w else spec.target(spec.arrow_names[w[0]])
            if tgt_w != src:
                continue
            nf = system.reduce_terms({(ai,) + w: 1})
            for nw, c in nf.items():
                m[pos[nw], pos[w]] = c % spec.p
        mats[name] = m
    return FdModule(handle, np.array(block_of, dtype=np.int64), mats)


_HANDLES: dict = {}


def _handle_for(system: CompletedSystem) -> QuiverAlgebra:
    """One shared handle per completed system (module compatibility)."""
    key = id(system)
    if key not in _HANDLES:
        _HANDLES[key] = (system, QuiverAlgebra(system))
    return _HANDLES[key][1]


def quiver_algebra(system: CompletedSystem) -> QuiverAlgebra:
    return _handle_for(system)


# ---------------------------------------------------------------------------
# Hom spaces


@dataclass
class HomBasis:
    source: FdModule
    target: FdModule
    basis: list  # dimN x dimM int64 matrices

    @property
    def dim(self):
        return len(self.basis)


def _grading_mask(M, N):
    # allowed intertwiner support: rows and columns in matching blocks
    return N.block_of.reshape(-1, 1) == M.block_of.reshape(1, -1)


def _naive_hom_basis(M, N, gen_order=None):
    """Nullspace of the stacked intertwiner conditions, masked by grading."""
    p = M.p
    mask = _grading_mask(M, N)
    unknowns = np.argwhere(mask)
    ucount = unknowns.shape[0]
    if ucount == 0:
        return []
    colindex = -np.ones((N.dim, M.dim), dtype=np.int64)
    for k, (i, j) in enumerate(unknowns):
        colindex[i, j] = k
    rows = []
    names = list(gen_order if gen_order is not None else M.algebra.generators)
    for name in names:
        a_m, a_n = M.mats[name], N.mats[name]
        # condition C = a_n F - F a_m = 0, coefficient extraction per entry
        for i in range(N.dim):
            for j in range(M.dim):
                row = np.zeros(ucount, dtype=np.int64)
                for k in range(N.dim):
                    c = colindex[k, j]
                    if c >= 0 and a_n[i, k]:
                        row[c] = (row[c] + a_n[i, k]) % p
                for l in range(M.dim):
                    c = colindex[i, l]
                    if c >= 0 and a_m[l, j]:
                        row[c] = (row[c] - a_m[l, j]) % p
                if np.any(row):
                    rows.append(row)
    if not rows:
        sysmat = np.zeros((1, ucount), dtype=np.int64)
    else:
        sysmat = np.array(rows, dtype=np.int64)
    ker = flinalg.nullspace(sysmat, p)
    out = []
    for c in range(ker.shape[1]):
        f = np.zeros((N.dim, M.dim), dtype=np.int64)
        f[unknowns[:, 0], unknowns[:, 1]] = ker[:, c]
        out.append(f)
    return out


def nilpotent_jordan(N, p):
    """Jordan basis of a nilpotent matrix: (P, block_sizes).

    P's columns are chains (v, Nv, N^2 v, ...) so P^-1 N P has ones on the
    subdiagonal within each block.  Blocks are listed in P's column order.
    """
    n = N.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64), []
    powers = [np.eye(n, dtype=np.int64) % p]
    while np.any(powers[-1]):
        powers.append(flinalg.matmul_mod(powers[-1], N, p))
    s = len(powers) - 1  # nilpotency index
    kerN = flinalg.nullspace(N, p)
    bottoms = np.zeros((n, 0), dtype=np.int64)
    chains = []
    for j in range(s, 0, -1):
        if j == 1:
            w_space = kerN
        else:
            im = flinalg.col_space_basis(powers[j - 1], p)
            w_space = flinalg.intersect_col_spaces(kerN, im, p)
        # extend current bottoms to a basis of w_space
        for c in range(w_space.shape[1]):
            v = w_space[:, c]
            if flinalg.in_span(bottoms, v, p):
                continue
            bottoms = np.concatenate([bottoms, v.reshape(-1, 1)], axis=1)
            top = flinalg.solve(powers[j - 1], v, p)
            assert top is not None
            chain = [top % p]
            for _ in range(j - 1):
                chain.append(
                    flinalg.matmul_mod(N, chain[-1].reshape(-1, 1), p).ravel()
                )
            chains.append(np.column_stack(chain))
    P = np.concatenate([c for c in chains], axis=1)
    assert P.shape == (n, n) and flinalg.rank(P, p) == n
    return P, [c.shape[1] for c in chains]


def _shift_solution_basis(r, s):
    """Basis of X (r x s) with N_r X = X N_s, N_* subdiagonal nilpotents."""
    out = []
    for a in range(max(0, r - s), r):
        x = np.zeros((r, s), dtype=np.int64)
        for k in range(min(s, r - a)):
            x[a + k, k] = 1
        out.append(x)
    return out


def _sylvester_unipotent_basis(A, B, p):
    """Basis of {F : A F = F B} for unipotent A (n x n), B (m x m)."""
    n, m = A.shape[0], B.shape[0]
    I_n = np.eye(n, dtype=np.int64)
    I_m = np.eye(m, dtype=np.int64)
    Pa, blocks_a = nilpotent_jordan((A - I_n) % p, p)
    Pb, blocks_b = nilpotent_jordan((B - I_m) % p, p)
    Pa_inv = flinalg.inv(Pa, p)
    Pb_inv = flinalg.inv(Pb, p)
    offs_a = np.cumsum([0] + blocks_a)
    offs_b = np.cumsum([0] + blocks_b)
    out = []
    for ia, r in enumerate(blocks_a):
        for ib, s in enumerate(blocks_b):
            for x in _shift_solution_basis(r, s):
                g = np.zeros((n, m), dtype=np.int64)
                g[offs_a[ia] : offs_a[ia] + r, offs_b[ib] : offs_b[ib] + s] = x
                f = flinalg.matmul_mod(flinalg.matmul_mod(Pa, g, p), Pb_inv, p)
                out.append(f)
    return out


def _filter_by_condition(basis, cond, p):
    """Sub-basis of span(basis) killed by the linear map cond(F)."""
    if not basis:
        return []
    imgs = np.column_stack([cond(f).ravel() % p for f in basis])
    ker = flinalg.nullspace(imgs, p)
    out = []
    for c in range(ker.shape[1]):
        f = np.zeros_like(basis[0])
        for i, w in enumerate(ker[:, c]):
            if w:
                f = (f + int(w) * basis[i]) % p
        out.append(f)
    return out


def _group_hom_basis(M, N):
    """Intertwiners via Jordan form of the order-p generators.

    Solve the Sylvester condition for the first unipotent generator in
    closed form, then impose the remaining generators as small linear
    conditions on that parameter space.
    """
    p = M.p
    uni, semi = M.algebra.hom_split()
    first = uni[0]
    basis = _sylvester_unipotent_basis(N.mats[first], M.mats[first], p)
    for name in list(uni[1:]) + [semi]:
        a_m, a_n = M.mats[name], N.mats[name]
        cond = lambda f, a_m=a_m, a_n=a_n: (
            flinalg.matmul_mod(a_n, f, p) - flinalg.matmul_mod(f, a_m, p)
        ) % p
        basis = _filter_by_condition(basis, cond, p)
    return basis


def hom_space(M: FdModule, N: FdModule) -> HomBasis:
    """All grading-preserving intertwiners M -> N."""
    if M.algebra is not N.algebra:
        raise ValueError("hom_space across different algebra handles")
    if M.dim == 0 or N.dim == 0:
        return HomBasis(M, N, [])
    if M.algebra.hom_split() is not None and M.dim * N.dim > 400:
        basis = _group_hom_basis(M, N)
    else:
        basis = _naive_hom_basis(M, N)
    return HomBasis(M, N, basis)


# ---------------------------------------------------------------------------
# covers, syzygies, Ext


@dataclass
class CoverResult:
    projective: FdModule
    surjection: np.ndarray  # dim M x dim P
    multiplicities: dict
    summand_labels: list  # label per summand, in column-block order
    summand_offsets: list


def projective_cover(M: FdModule) -> CoverResult:
    if M.dim == 0:
        raise ValueError("zero module has no projective cover")
    alg = M.algebra
    p = alg.p
    picks = alg.top_pick(M)
    mult = {}
    parts = []
    cols = []
    labels_order = []
    offsets = []
    at = 0
    for label, u in picks:
        mult[label] = mult.get(label, 0) + 1
        P_l = alg.projective_module(label)
        parts.append(P_l)
        cols.append(alg.yoneda_columns(label, M, u))
        labels_order.append(label)
        offsets.append(at)
        at += P_l.dim
    P = direct_sum(parts)
    phi = np.concatenate(cols, axis=1) % p
    if flinalg.rank(phi, p) != M.dim:
        raise ValueError("cover surjection failed to be onto")
    radP = alg.radical_image_columns(P)
    ker = flinalg.nullspace(phi, p)
    if ker.shape[1]:
        joint = np.concatenate([radP, ker], axis=1)
        if flinalg.rank(joint, p) != flinalg.rank(radP, p):
            raise ValueError("cover kernel escapes the radical (not minimal)")
    return CoverResult(P, phi, mult, labels_order, offsets)


def _syzygy_with_embedding(M: FdModule):
    if M.dim == 0:
        return zero_module(M.algebra), np.zeros((0, 0), dtype=np.int64), None
    cover = projective_cover(M)
    P, phi = cover.projective, cover.surjection
    p = M.p
    # kernel of phi, blockwise so the grading carries over
    cols = []
    block_of = []
    for i, _label in enumerate(M.algebra.grading_labels):
        idx = P.block_indices(i)
        if idx.size == 0:
            continue
        ker = flinalg.nullspace(phi[:, idx], p)
        for c in range(ker.shape[1]):
            v = np.zeros(P.dim, dtype=np.int64)
            v[idx] = ker[:, c]
            cols.append(v)
            block_of.append(i)
    if not cols:
        return zero_module(M.algebra), np.zeros((P.dim, 0), dtype=np.int64), cover
    incl = np.column_stack(cols)
    mats = {}
    for name in M.algebra.generators:
        img = flinalg.matmul_mod(P.mats[name], incl, p)
        act = flinalg.solve(incl, img, p)
        assert act is not None, "kernel not generator-stable"
        mats[name] = act
    omega = FdModule(M.algebra, np.array(block_of, dtype=np.int64), mats,
                     check=False)
    return omega, incl, cover


def syzygy(M: FdModule) -> FdModule:
    return _syzygy_with_embedding(M)[0]


def _hom_from_projective(cover: CoverResult, N: FdModule):
    """Yoneda basis of Hom(P, N) for an assembled cover P = bigoplus P_l."""
    alg = N.algebra
    out = []
    for label, off in zip(cover.summand_labels, cover.summand_offsets):
        P_l = alg.projective_module(label)
        for x in _label_component_basis(alg, N, label):
            f = np.zeros((N.dim, cover.projective.dim), dtype=np.int64)
            f[:, off : off + P_l.dim] = alg.yoneda_columns(label, N, x)
            out.append(f)
    return out


def _label_component_basis(alg, N, label):
    """Basis of the label-component of N: Hom(P_label, N) generators."""
    vecs = []
    for v in alg.component_vectors(N, label):
        vecs.append(v)
    return vecs


@dataclass
class ExtClass:
    degree: int
    source: FdModule
    target: FdModule
    dim: int
    representative: object  # ("syzygy_hom", mat, context) | ("cocycle", dict, context) | None

    def representative_is_trivial(self):
        if self.representative is None:
            return True
        kind = self.representative[0]
        if kind == "syzygy_hom":
            _, mat, (restr, p) = self.representative
            if not np.any(mat):
                return True
            if restr.size == 0:
                return False
            return flinalg.in_span(restr, mat.ravel() % p, p)
        _, theta, (cob, p, slotmap, total) = self.representative
        v = np.zeros(total, dtype=np.int64)
        for name, (pos, off) in slotmap.items():
            if pos.shape[0]:
                v[off : off + pos.shape[0]] = theta[name][pos[:, 0], pos[:, 1]]
        v %= p
        if not np.any(v):
            return True
        if cob.size == 0:
            return False
        return flinalg.in_span(cob, v, p)


def ext_dim(M: FdModule, N: FdModule, i: int) -> ExtClass:
    """dim Ext^i via the minimal resolution, i in {1, 2}."""
    if i not in (1, 2):
        raise ValueError("only Ext^1 and Ext^2 are supported")
    if i == 2:
        inner = ext_dim(syzygy(M), N, 1)
        return ExtClass(2, M, N, inner.dim, inner.representative)
    if M.dim == 0 or N.dim == 0:
        return ExtClass(1, M, N, 0, None)
    omega, incl, cover = _syzygy_with_embedding(M)
    if omega.dim == 0:
        return ExtClass(1, M, N, 0, None)
    p = M.p
    hom_omega = hom_space(omega, N).basis
    restr_mats = [
        flinalg.matmul_mod(f, incl, p) for f in _hom_from_projective(cover, N)
    ]
    if restr_mats:
        restr = np.column_stack([m.ravel() for m in restr_mats]) % p
        rk = flinalg.rank(restr, p)
    else:
        restr = np.zeros((N.dim * omega.dim, 0), dtype=np.int64)
        rk = 0
    dim = len(hom_omega) - rk
    rep = None
    if dim > 0:
        for f in hom_omega:
            if restr.size == 0 or not flinalg.in_span(restr, f.ravel(), p):
                rep = ("syzygy_hom", f, (restr, p))
                break
    return ExtClass(1, M, N, dim, rep)


def stable_hom_dim(M: FdModule, N: FdModule) -> int:
    """dim of Hom(M, N) modulo maps factoring through a projective."""
    if M.dim == 0 or N.dim == 0:
        return 0
    p = M.p
    homs = hom_space(M, N).basis
    if not homs:
        return 0
    cover = projective_cover(N)
    through = hom_space(M, cover.projective).basis
    if not through:
        return len(homs)
    factored = [
        flinalg.matmul_mod(cover.surjection, f, p) for f in through
    ]
    all_vecs = np.column_stack([f.ravel() for f in homs]) % p
    fac_vecs = np.column_stack([f.ravel() for f in factored]) % p
    return flinalg.rank(all_vecs, p) - flinalg.rank(fac_vecs, p)


def ext1_by_extensions(M: FdModule, N: FdModule) -> ExtClass:
    """Independent Ext^1 oracle via block-triangular extension structures.

    theta assigns each generator an off-diagonal block; the extension
    matrices [[a_N, theta_a], [0, a_M]] must satisfy every relation, which
    is linear in theta.  Quotient by the coboundaries theta_f.
    """
    alg = M.algebra
    p = alg.p
    if M.dim == 0 or N.dim == 0:
        return ExtClass(1, M, N, 0, None)
    names = list(alg.generators)
    slots = {}
    total = 0
    for name in names:
        blk = alg.gen_block(name)
        if blk is None:
            mask = np.ones((N.dim, M.dim), dtype=bool)
        else:
            labels = list(alg.grading_labels)
            src, tgt = labels.index(blk[0]), labels.index(blk[1])
            mask = (N.block_of.reshape(-1, 1) == tgt) & (
                M.block_of.reshape(1, -1) == src
            )
        pos = np.argwhere(mask)
        slots[name] = (pos, total)
        total += pos.shape[0]
    if total == 0:
        return ExtClass(1, M, N, 0, None)

    def theta_coeff_rows(combo):
        """Linear map theta -> top-right block of sum c_w prod(ext mats)."""
        rows = np.zeros((N.dim * M.dim, total), dtype=np.int64)
        for coeff, word in combo:
            L = len(word)
            for k in range(L):
                left = N.word_matrix(word[:k])
                right = M.word_matrix(word[k + 1 :])
                pos, off = slots[word[k]]
                # contribution: left @ E_(i,j) @ right, E over theta slots
                for t, (i, j) in enumerate(pos):
                    contrib = np.outer(left[:, i], right[j, :]) % p
                    rows[:, off + t] = (
                        rows[:, off + t] + coeff * contrib.ravel()
                    ) % p
        return rows

    blocks = [theta_coeff_rows(combo) for _, combo in alg.relation_items()]
    sysmat = np.concatenate(blocks, axis=0) if blocks else np.zeros(
        (1, total), dtype=np.int64
    )
    sol = flinalg.nullspace(sysmat, p)
    # coboundaries: theta_f(a) = a_N f - f a_M over graded f
    mask_f = _grading_mask(M, N)
    fpos = np.argwhere(mask_f)
    cob_cols = []
    for i, j in fpos:
        f = np.zeros((N.dim, M.dim), dtype=np.int64)
        f[i, j] = 1
        vec = np.zeros(total, dtype=np.int64)
        for name in names:
            tf = (
                flinalg.matmul_mod(N.mats[name], f, p)
                - flinalg.matmul_mod(f, M.mats[name], p)
            ) % p
            pos, off = slots[name]
            vec[off : off + pos.shape[0]] = tf[pos[:, 0], pos[:, 1]]
        cob_cols.append(vec)
    cob = (
        np.column_stack(cob_cols) % p
        if cob_cols
        else np.zeros((total, 0), dtype=np.int64)
    )
    dim = flinalg.rank(np.concatenate([sol, cob], axis=1), p) - flinalg.rank(
        cob, p
    )
    rep = None
    if dim > 0:
        for c in range(sol.shape[1]):
            v = sol[:, c]
            if cob.size == 0 or not flinalg.in_span(cob, v, p):
                theta = {}
                for name in names:
                    pos, off = slots[name]
                    m = np.zeros((N.dim, M.dim), dtype=np.int64)
                    m[pos[:, 0], pos[:, 1]] = v[off : off + pos.shape[0]]
                    theta[name] = m
                rep = ("cocycle", theta, (cob, p, dict(slots), total))
                break
    return ExtClass(1, M, N, dim, rep)


# ---------------------------------------------------------------------------
# structure series


@dataclass
class StructureReport:
    top: dict
    socle: dict
    radical_layer_dims: list
    radical_layers: list  # label multiplicity dict per layer, top first
    composition_factors: dict
    uniserial: bool

    @property
    def length(self):
        return sum(self.composition_factors.values())


def _radical_filtration(M):
    """Column bases of M >= rad M >= rad^2 M >= ... (strictly, down to 0)."""
    alg = M.algebra
    p = alg.p
    layers = [np.eye(M.dim, dtype=np.int64)]
    current = M
    maps = [np.eye(M.dim, dtype=np.int64)]  # embedding of current into M
    while current.dim:
        rad = alg.radical_image_columns(current)
        if rad.shape[1] == 0:
            break
        emb = flinalg.matmul_mod(maps[-1], rad, p)
        layers.append(emb)
        mats = {}
        ok = True
        for name in alg.generators:
            img = flinalg.matmul_mod(M.mats[name], emb, p)
            act = flinalg.solve(emb, img, p)
            assert act is not None
            mats[name] = act
        block_of = _blocks_of_columns(M, emb)
        current = FdModule(alg, block_of, mats, check=False)
        maps.append(emb)
    return layers


def _blocks_of_columns(M, cols):
    out = []
    for j in range(cols.shape[1]):
        rows = np.nonzero(cols[:, j])[0]
        blocks = set(int(M.block_of[r]) for r in rows)
        if len(blocks) != 1:
            # group-algebra case: single block anyway
            blocks = {0}
        out.append(blocks.pop())
    return np.array(out, dtype=np.int64)


def module_structure(M: FdModule) -> StructureReport:
    alg = M.algebra
    p = alg.p
    if M.dim == 0:
        return StructureReport({}, {}, [], [], {}, True)
    filt = _radical_filtration(M)
    layer_mults = []
    for k in range(len(filt)):
        upper = filt[k]
        lower = filt[k + 1] if k + 1 < len(filt) else np.zeros(
            (M.dim, 0), dtype=np.int64
        )
        mults = alg.section_label_dims_quotient(M, upper, lower)
        layer_mults.append(mults)
    # socle: annihilator of the radical
    soc_cols = alg.socle_columns(M)
    soc = alg.section_label_dims_quotient(
        M, soc_cols, np.zeros((M.dim, 0), dtype=np.int64)
    )
    comp = {}
    for mults in layer_mults:
        for label, m in mults.items():
            comp[label] = comp.get(label, 0) + m
    uniserial = all(sum(m.values()) == 1 for m in layer_mults)
    return StructureReport(
        top=layer_mults[0],
        socle=soc,
        radical_layer_dims=[sum(m.values()) for m in layer_mults],
        radical_layers=layer_mults,
        composition_factors=comp,
        uniserial=uniserial,
    )


# label-dimension helpers shared by both handle kinds; monkey-free: the
# quiver handle gets them here, the group handle implements the same names.


def _quiver_section_label_dims_quotient(self, M, upper, lower):
    """Multiplicities in the semisimple section span(upper)/span(lower)."""
    p = self.p
    out = {}
    for i, label in enumerate(self.grading_labels):
        idx = M.block_indices(i)
        if idx.size == 0:
            continue
        up = upper[idx, :]
        lo = lower[idx, :]
        d = flinalg.rank(np.concatenate([lo, up], axis=1), p) - flinalg.rank(
            lo, p
        )
        if d:
            out[label] = d
    return out


def _quiver_socle_columns(self, M):
    p = self.p
    stacked = np.concatenate(
        [M.mats[name] for name in self.generators], axis=0
    )
    return flinalg.nullspace(stacked, p)


def _quiver_component_vectors(self, N, label):
    idx_label = list(self.grading_labels).index(label)
    out = []
    for i in np.nonzero(N.block_of == idx_label)[0]:
        v = np.zeros(N.dim, dtype=np.int64)
        v[i] = 1
        out.append(v)
    return out


QuiverAlgebra.section_label_dims_quotient = _quiver_section_label_dims_quotient
QuiverAlgebra.socle_columns = _quiver_socle_columns
QuiverAlgebra.component_vectors = _quiver_component_vectors


# ---------------------------------------------------------------------------
# isomorphism testing


@dataclass
class IsoResult:
    isomorphic: bool
    witness: object
    method: str
    definitive: bool

    def __bool__(self):
        return self.isomorphic


def _verify_witness(M, N, W):
    p = M.p
    if flinalg.rank(W, p) != M.dim:
        return False
    for name in M.algebra.generators:
        lhs = flinalg.matmul_mod(W, M.mats[name], p)
        rhs = flinalg.matmul_mod(N.mats[name], W, p)
        if np.any((lhs - rhs) % p):
            return False
    return True


def _invertible_in_span(basis, p, rng, samples):
    n = basis[0].shape[0]
    for _ in range(samples):
        coeffs = rng.integers(0, p, size=len(basis))
        W = np.zeros_like(basis[0])
        for c, b in zip(coeffs, basis):
            if c:
                W = (W + int(c) * b) % p
        if flinalg.rank(W, p) == n:
            return W
    return None


def is_isomorphic(M: FdModule, N: FdModule, seed=0) -> IsoResult:
    """Invertible-intertwiner search with the fixed fallback ladder."""
    if M.algebra is not N.algebra:
        raise ValueError("is_isomorphic across different algebra handles")
    if M.dim != N.dim or M.dimension_vector() != N.dimension_vector():
        return IsoResult(False, None, "dimension-vector", True)
    if M.dim == 0:
        return IsoResult(True, np.zeros((0, 0), dtype=np.int64), "trivial", True)
    if (
        module_structure(M).composition_factors
        != module_structure(N).composition_factors
    ):
        return IsoResult(False, None, "composition-factors", True)
    p = M.p
    homs = hom_space(M, N).basis
    if not homs:
        return IsoResult(False, None, "hom-space-empty", True)
    h = len(homs)
    if p**h <= 2**20:
        for coeffs in itertools.product(range(p), repeat=h):
            W = np.zeros_like(homs[0])
            for c, b in zip(coeffs, homs):
                if c:
                    W = (W + c * b) % p
            if np.any(W) and flinalg.rank(W, p) == M.dim:
                assert _verify_witness(M, N, W)
                return IsoResult(True, W, "exhaustive", True)
        return IsoResult(False, None, "exhaustive", True)
    rng = np.random.default_rng(seed)
    W = _invertible_in_span(homs, p, rng, 1000)
    if W is not None:
        assert _verify_witness(M, N, W)
        return IsoResult(True, W, "random", True)
    return _peeling_isomorphic(M, N, seed)


def _submodule_from_columns(M, cols):
    p = M.p
    mats = {}
    for name in M.algebra.generators:
        img = flinalg.matmul_mod(M.mats[name], cols, p)
        act = flinalg.solve(cols, img, p)
        if act is None:
            return None
        mats[name] = act
    return FdModule(M.algebra, _blocks_of_columns(M, cols), mats, check=False)


def _fitting_split(M, seed):
    """Try to write M as a nontrivial direct sum via a Fitting decomposition."""
    p = M.p
    ends = hom_space(M, M).basis
    rng = np.random.default_rng(seed)
    candidates = list(ends)
    for _ in range(40):
        coeffs = rng.integers(0, p, size=len(ends))
        W = np.zeros_like(ends[0])
        for c, b in zip(coeffs, ends):
            if c:
                W = (W + int(c) * b) % p
        candidates.append(W)
    for phi in candidates:
        power = np.eye(M.dim, dtype=np.int64)
        for _ in range(M.dim):
            power = flinalg.matmul_mod(power, phi, p)
        r = flinalg.rank(power, p)
        if r == 0 or r == M.dim:
            continue
        im = flinalg.col_space_basis(power, p)
        ker = flinalg.nullspace(power, p)
        cols = np.concatenate([im, ker], axis=1)
        if flinalg.rank(cols, p) != M.dim:
            continue
        return [im, ker]
    return None


def _peel(M, seed):
    """Full decomposition into (columns, module) indecomposable pieces."""
    split = _fitting_split(M, seed)
    if split is None:
        return [(np.eye(M.dim, dtype=np.int64), M)]
    out = []
    p = M.p
    for cols in split:
        sub = _submodule_from_columns(M, cols)
        assert sub is not None
        for inner_cols, piece in _peel(sub, seed + 1):
            out.append((flinalg.matmul_mod(cols, inner_cols, p), piece))
    return out


def _peeling_isomorphic(M, N, seed):
    p = M.p
    pieces_m = _peel(M, seed)
    pieces_n = _peel(N, seed + 101)
    if sorted(pm.dim for _, pm in pieces_m) != sorted(
        pn.dim for _, pn in pieces_n
    ):
        return IsoResult(False, None, "peeling", True)
    used = [False] * len(pieces_n)
    matches = []
    for cols_m, pm in pieces_m:
        found = None
        for j, (cols_n, pn) in enumerate(pieces_n):
            if used[j] or pn.dim != pm.dim:
                continue
            sub = _match_indecomposable(pm, pn, seed)
            if sub is not None:
                found = (j, cols_n, sub)
                break
        if found is None:
            return IsoResult(False, None, "peeling", False)
        j, cols_n, w = found
        used[j] = True
        matches.append((cols_m, cols_n, w))
    # assemble the global witness: W maps M to N
    C_m = np.concatenate([m[0] for m in matches], axis=1)
    blocks = []
    at = 0
    n_total = sum(m[2].shape[0] for m in matches)
    W_block = np.zeros((n_total, C_m.shape[1]), dtype=np.int64)
    at_r = at_c = 0
    for _, _, w in matches:
        r, c = w.shape
        W_block[at_r : at_r + r, at_c : at_c + c] = w
        at_r += r
        at_c += c
    C_n = np.concatenate([m[1] for m in matches], axis=1)
    W = flinalg.matmul_mod(
        C_n, flinalg.matmul_mod(W_block, flinalg.inv(C_m, p), p), p
    )
    if _verify_witness(M, N, W):
        return IsoResult(True, W, "peeling", True)
    return IsoResult(False, None, "peeling", False)


def _match_indecomposable(pm, pn, seed):
    if pm.dimension_vector() != pn.dimension_vector():
        return None
    p = pm.p
    homs = hom_space(pm, pn).basis
    if not homs:
        return None
    h = len(homs)
    if p**h <= 2**16:
        for coeffs in itertools.product(range(p), repeat=h):
            W = np.zeros_like(homs[0])
            for c, b in zip(coeffs, homs):
                if c:
                    W = (W + c * b) % p
            if np.any(W) and flinalg.rank(W, p) == pm.dim:
                return W
        return None
    rng = np.random.default_rng(seed)
    return _invertible_in_span(homs, p, rng, 1000)


# ---------------------------------------------------------------------------
# module fixture files


def parse_module_fixture(text: str, algebra) -> FdModule:
    """dim:/vertices:/matrix <gen>: sections; omitted generators act as 0."""
    dim = None
    block_labels = None
    mats = {}
    current = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        low = stripped.lower()
        if low.startswith("algebra:"):
            continue  # resolved by the caller
        if low.startswith("dim:"):
            dim = int(stripped.split(":", 1)[1])
            continue
        if low.startswith("vertices:"):
            from .quiver import _as_vertex

            block_labels = [
                _as_vertex(t) for t in stripped.split(":", 1)[1].split()
            ]
            continue
        if low.startswith("matrix"):
            if current is not None:
                mats[current] = rows
            current = stripped.split(None, 1)[1].rstrip(":").strip()
            rows = []
            continue
        if current is None:
            raise ValueError(f"line {lineno}: unexpected {stripped!r}")
        rows.append([int(t) for t in stripped.split()])
    if current is not None:
        mats[current] = rows
    if dim is None:
        raise ValueError("missing dim: line")
    labels = list(algebra.grading_labels)
    if block_labels is None:
        if len(labels) != 1:
            raise ValueError("missing vertices: line for a graded algebra")
        block_of = np.zeros(dim, dtype=np.int64)
    else:
        if len(block_labels) != dim:
            raise ValueError("vertices: length does not match dim:")
        block_of = np.array([labels.index(b) for b in block_labels])
    built = {}
    for name, rowdata in mats.items():
        if name not in algebra.generators:
            raise ValueError(f"unknown generator {name!r}")
        m = np.array(rowdata, dtype=np.int64)
        if m.shape != (dim, dim):
            raise ValueError(f"matrix {name} has shape {m.shape}")
        built[name] = m
    return FdModule(algebra, block_of, built)


def print_module_fixture(M: FdModule) -> str:
    lines = [f"dim: {M.dim}"]
    labels = list(M.algebra.grading_labels)
    if len(labels) > 1:
        lines.append(
            "vertices: " + " ".join(str(labels[i]) for i in M.block_of)
        )
    for name in M.algebra.generators:
        if not np.any(M.mats[name]):
            continue
        lines.append(f"matrix {name}:")
        for row in M.mats[name]:
            lines.append("  " + " ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"
