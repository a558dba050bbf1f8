"""Truncated-Fock-space laboratory: exact diagonalization cross-checks for
the Gaussian machinery, plus the recovery-map test for thermodynamic
initial conditions.

Everything here is finite-dimensional and basis-explicit. The pair space
orders basis states as |n_S> x |n_O| with the O index fastest; operators
are built from the truncated ladder matrix. Matrix functions (exp, sqrt,
log) go through Hermitian eigendecompositions with small eigenvalues
clipped at 1e-14, which is safe because every input is PSD by
construction.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "DensityMatrix",
    "BlockSpec",
    "annihilation_op",
    "thermal_state",
    "squeezed_vacuum",
    "mode_moments",
    "partial_trace",
    "so_hamiltonian",
    "truncated_so_gibbs",
    "lindblad_evolve_truncated",
    "relative_entropy",
    "petz_map",
    "verify_thermo_initial_condition",
    "build_block_state",
]

_EIG_CLIP = 1e-14


@dataclass
class DensityMatrix:
    """Validated finite-dimensional density matrix."""

    dim: int
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.shape != (self.dim, self.dim):
            raise ValueError("entries must be a dim x dim matrix")
        herm = np.abs(self.entries - self.entries.conj().T).max()
        if herm > 1e-12:
            raise ValueError(f"not Hermitian (deviation {herm:g})")
        tr = self.entries.trace().real
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"trace {tr!r} is not 1")
        if self.dim > 256:
            # eigvalsh is the test for small matrices; for the big Gibbs
            # states a Cholesky of entries + tol*I checks PSD-to--tol at a
            # third of the cost (a real factorization when the matrix is
            # real, at a quarter of the complex one)
            m = self.entries + 1e-10 * np.eye(self.dim)
            if not np.any(m.imag):
                m = m.real
            try:
                np.linalg.cholesky(m)
            except np.linalg.LinAlgError:
                raise ValueError("not positive semidefinite") from None
        else:
            w = np.linalg.eigvalsh(self.entries)
            if w.min() < -1e-10:
                raise ValueError(
                    f"not positive semidefinite (min eig {w.min():g})")


@dataclass
class BlockSpec:
    """Block decomposition of a system-plus-reservoir state.

    Each entry is (dim_a, dim_b, weight, state_a, state_br): the system
    space splits as a direct sum of A_j x B_j sectors, block j carrying
    weight p_j, a density matrix on A_j, and a joint density matrix on
    B_j x R. dim_r is the reservoir dimension shared by all blocks.
    """

    blocks: tuple
    dim_r: int

    def __post_init__(self):
        if self.dim_r < 1:
            raise ValueError("reservoir dimension must be positive")
        blocks = tuple(self.blocks)
        if not blocks:
            raise ValueError("at least one block required")
        total = 0.0
        for dim_a, dim_b, weight, state_a, state_br in blocks:
            if dim_a < 1 or dim_b < 1:
                raise ValueError("block dimensions must be positive")
            if weight < 0:
                raise ValueError("block weights must be nonnegative")
            state_a = np.asarray(state_a, dtype=complex)
            state_br = np.asarray(state_br, dtype=complex)
            if state_a.shape != (dim_a, dim_a):
                raise ValueError("state_a shape mismatch")
            if state_br.shape != (dim_b * self.dim_r, dim_b * self.dim_r):
                raise ValueError("state_br shape mismatch")
            total += weight
        if abs(total - 1.0) > 1e-10:
            raise ValueError("block weights must sum to 1")
        self.blocks = blocks

    @property
    def dim_s(self):
        return sum(da * db for da, db, *_ in self.blocks)


def annihilation_op(dim):
    """Truncated ladder operator on a dim-level Fock space."""
    return np.diag(np.sqrt(np.arange(1.0, dim)), k=1).astype(complex)


def thermal_state(omega, beta, dim):
    """Truncated thermal state of one mode, renormalized on the truncation."""
    w = np.exp(-beta * omega * np.arange(dim))
    return DensityMatrix(dim=dim, entries=np.diag(w / w.sum()).astype(complex))


def squeezed_vacuum(r, theta, dim):
    """Truncated squeezed vacuum (squeeze magnitude r, phase theta).

    Note the truncation biases the second moments at order
    tanh(r)^(dim-1): the exact squeezed vacuum saturates the uncertainty
    relation, which no finite-dimensional state can do, so callers that
    cross-validate dynamics against Gaussian references should seed those
    references with this state's actual moments (mode_moments).
    """
    if r < 0:
        raise ValueError("squeeze magnitude must be nonnegative")
    psi = np.zeros(dim, dtype=complex)
    # amplitude on |2n>: (-e^{i theta} tanh r)^n sqrt((2n)!)/(2^n n!)
    amp = 1.0 + 0j
    psi[0] = amp
    zeta = -np.exp(1j * theta) * np.tanh(r)
    for n in range(1, (dim - 1) // 2 + 1):
        amp = amp * zeta * np.sqrt((2 * n - 1) * (2 * n)) / (2 * n)
        psi[2 * n] = amp
    psi /= np.linalg.norm(psi)
    return DensityMatrix(dim=dim, entries=np.outer(psi, psi.conj()))


def mode_moments(rho):
    """First and second ladder moments (<a>, <a+a>, <aa>) of a one-mode
    state."""
    r = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    a = annihilation_op(r.shape[0])
    return (complex(np.trace(r @ a)),
            float(np.trace(r @ (a.conj().T @ a)).real),
            complex(np.trace(r @ (a @ a))))


def partial_trace(entries, dim_a, dim_b, keep):
    """Partial trace of a matrix on A x B; keep is 'a' or 'b'."""
    m = np.asarray(entries, dtype=complex).reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "a":
        return np.einsum("ijkj->ik", m)
    if keep == "b":
        return np.einsum("ijil->jl", m)
    raise ValueError("keep must be 'a' or 'b'")


def so_hamiltonian(p, n_max):
    """Truncated pair Hamiltonian w0(a+a + d+d) + kappa(a+d + a d+)."""
    dim = n_max + 1
    a1 = annihilation_op(dim)
    num = a1.conj().T @ a1
    eye = np.eye(dim)
    h = (p.omega0 * (np.kron(num, eye) + np.kron(eye, num))
         + p.kappa * (np.kron(a1.conj().T, a1) + np.kron(a1, a1.conj().T)))
    return h


def truncated_so_gibbs(n_max, beta, p):
    """Gibbs state of the truncated pair Hamiltonian via eigendecomposition.

    The exchange coupling conserves the total excitation number, so the
    Hamiltonian is block tridiagonal over total-excitation shells and the
    eigendecomposition runs shell by shell (cost n_max^4 instead of
    n_max^6). Warns when the top Fock shell of either mode carries more
    than 1e-8 population (the truncation then biases reduced moments).
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    dim = n_max + 1
    rho = np.zeros((dim * dim, dim * dim))
    z = 0.0
    for total in range(2 * n_max + 1):
        ns = np.arange(max(0, total - n_max), min(total, n_max) + 1)
        idx = ns * dim + (total - ns)
        diag = np.full(len(ns), p.omega0 * float(total))
        if len(ns) == 1:
            w = diag
            v = np.ones((1, 1))
        else:
            off = p.kappa * np.sqrt(ns[1:] * (total - ns[1:] + 1.0))
            w, v = eigh_tridiagonal(diag, off)
        g = np.exp(-beta * w)  # all shell energies are >= 0
        z += g.sum()
        rho[np.ix_(idx, idx)] += (v * g) @ v.T
    rho /= z
    pop = rho.diagonal().reshape(dim, dim)
    tail = pop[-1, :].sum() + pop[:, -1].sum() - pop[-1, -1]
    if tail > 1e-8:
        warnings.warn(f"truncation tail weight {tail:.2e} > 1e-8; "
                      "increase n_max", stacklevel=2)
    return DensityMatrix(dim=dim * dim, entries=rho.astype(complex))


def _lindblad_rhs(p, n_max):
    """Matrix-form RHS of the pair master equation with normal-mode jumps."""
    from .model import bose_occupation, dressed_mode

    dim = n_max + 1
    h = so_hamiltonian(p, n_max)
    mode = dressed_mode(p.omega0, p)
    a1 = annihilation_op(dim)
    eye = np.eye(dim)
    a_s = np.kron(a1, eye)
    a_o = np.kron(eye, a1)
    root = 1.0 / np.sqrt(2.0)
    ls = []
    for c, omega in ((root * (a_s + a_o), mode.omega1),
                     (root * (a_s - a_o), mode.omega2)):
        nbar = bose_occupation(omega, p.beta)
        ls.append(np.sqrt(p.gamma / 2.0 * (nbar + 1.0)) * c)
        ls.append(np.sqrt(p.gamma / 2.0 * nbar) * c.conj().T)
    lls = [l.conj().T @ l for l in ls]

    def rhs(t, z):
        rho = z.reshape(dim * dim, dim * dim)
        out = -1j * (h @ rho - rho @ h)
        for l, ll in zip(ls, lls):
            out += l @ rho @ l.conj().T - 0.5 * (ll @ rho + rho @ ll)
        return out.ravel()

    return rhs


def lindblad_evolve_truncated(rho0, t_grid, p, n_max, rtol=1e-9, atol=1e-11):
    """Integrate the truncated pair master equation; returns DensityMatrix
    samples on t_grid.

    Raises when the top two total-excitation shells (n_S + n_O at
    2 n_max - 1 or above, where the exchange coupling pushes population
    off the truncated ladder) accumulate more than 1e-6 population, or
    when the trace drifts beyond 1e-9.
    """
    dim = n_max + 1
    if rho0.dim != dim * dim:
        raise ValueError("rho0 dimension does not match n_max")
    t = np.asarray(t_grid, dtype=float)
    shells = np.add.outer(np.arange(dim), np.arange(dim)).ravel()
    corner = shells >= 2 * n_max - 1
    sol = solve_ivp(_lindblad_rhs(p, n_max), (t[0], t[-1]),
                    rho0.entries.ravel().astype(complex), t_eval=t,
                    method="RK45", rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"master-equation integration failed: {sol.message}")
    out = []
    for k in range(sol.y.shape[1]):
        rho = sol.y[:, k].reshape(dim * dim, dim * dim)
        rho = 0.5 * (rho + rho.conj().T)
        tr = rho.trace().real
        if abs(tr - 1.0) > 1e-9:
            raise RuntimeError(f"trace drifted to {tr!r}")
        leak = rho.diagonal().real[corner].sum()
        if leak > 1e-6:
            raise RuntimeError(
                f"truncation leakage {leak:.2e} at t={sol.t[k]:g}; "
                "increase n_max")
        rho /= tr
        # the integrator leaves eigenvalues a few 1e-10 below zero; clip
        # them (a genuine failure shows up far above this floor)
        w, v = np.linalg.eigh(rho)
        if w.min() < -1e-8:
            raise RuntimeError(f"integration lost positivity "
                               f"(min eig {w.min():g} at t={sol.t[k]:g})")
        if w.min() < 0.0:
            w = np.clip(w, 0.0, None)
            rho = (v * (w / w.sum())) @ v.conj().T
            rho = 0.5 * (rho + rho.conj().T)
        out.append(DensityMatrix(dim=dim * dim, entries=rho))
    return out


def relative_entropy(rho, sigma):
    """Quantum relative entropy D(rho || sigma) in nats.

    Returns +inf when rho has support outside the support of sigma;
    0 log 0 counts as 0.
    """
    r = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    s = sigma.entries if isinstance(sigma, DensityMatrix) else np.asarray(sigma)
    wr, vr = np.linalg.eigh(r)
    ws, vs = np.linalg.eigh(s)
    wr = np.clip(wr, 0.0, None)
    tr_r_log_r = float(np.sum(wr[wr > _EIG_CLIP] * np.log(wr[wr > _EIG_CLIP])))
    # overlap of rho with each eigenvector of sigma
    weights = np.einsum("ij,ij->j", vs.conj(), r @ vs).real
    weights = np.clip(weights, 0.0, None)
    support_violation = weights[ws <= _EIG_CLIP].sum()
    if support_violation > 1e-12:
        return np.inf
    good = ws > _EIG_CLIP
    tr_r_log_s = float(np.sum(weights[good] * np.log(ws[good])))
    return tr_r_log_r - tr_r_log_s


def _psd_power(m, power):
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    if power < 0 and w.min() <= _EIG_CLIP:
        raise np.linalg.LinAlgError("matrix is rank deficient")
    wp = np.zeros_like(w)
    mask = w > _EIG_CLIP
    wp[mask] = w[mask] ** power
    return (v * wp) @ v.conj().T


def petz_map(rho_s, rho_srb):
    """Recovery map lifting a system state to the joint space:
    rho_srb^{1/2} [rho_seq^{-1/2} rho_s rho_seq^{-1/2} (x) 1] rho_srb^{1/2}
    with rho_seq the reduced equilibrium state (must be full rank)."""
    dim_s = rho_s.dim
    if rho_srb.dim % dim_s:
        raise ValueError("joint dimension is not a multiple of the system's")
    dim_r = rho_srb.dim // dim_s
    rho_seq = partial_trace(rho_srb.entries, dim_s, dim_r, keep="a")
    inv_root = _psd_power(rho_seq, -0.5)
    core = np.kron(inv_root @ rho_s.entries @ inv_root, np.eye(dim_r))
    root = _psd_power(rho_srb.entries, 0.5)
    out = root @ core @ root
    out = 0.5 * (out + out.conj().T)
    out /= out.trace().real
    return DensityMatrix(dim=rho_srb.dim, entries=out)


def verify_thermo_initial_condition(rho_sr, rho_srb, dim_s=None):
    """Data-processing gap D(rho_SR || rho_SRb) - D(rho_S || rho_Sb).

    Zero (within tolerance) exactly for states recovered by petz_map from
    their own reduction; strictly positive otherwise. dim_s defaults to
    the square root of the joint dimension (equal-factor layout).
    """
    if rho_srb.dim != rho_sr.dim:
        raise ValueError("state dimensions differ")
    if dim_s is None:
        dim_s = int(round(np.sqrt(rho_sr.dim)))
        if dim_s * dim_s != rho_sr.dim:
            raise ValueError("cannot infer the system dimension; pass dim_s")
    if rho_sr.dim % dim_s:
        raise ValueError("joint dimension is not a multiple of the system's")
    dim_r = rho_sr.dim // dim_s
    d_sr = relative_entropy(rho_sr, rho_srb)
    rs = partial_trace(rho_sr.entries, dim_s, dim_r, keep="a")
    rsb = partial_trace(rho_srb.entries, dim_s, dim_r, keep="a")
    d_s = relative_entropy(DensityMatrix(dim=dim_s, entries=rs),
                           DensityMatrix(dim=dim_s, entries=rsb))
    return d_sr - d_s


def build_block_state(spec):
    """Assemble the direct sum  sum_j p_j rho_A_j (x) sigma_B_jR  on the
    system-plus-reservoir space (system index slow, reservoir fast)."""
    dim_s = spec.dim_s
    dim_r = spec.dim_r
    n = dim_s * dim_r
    out = np.zeros((n, n), dtype=complex)
    offset = 0
    for dim_a, dim_b, weight, state_a, state_br in spec.blocks:
        state_a = np.asarray(state_a, dtype=complex)
        sigma = np.asarray(state_br, dtype=complex).reshape(
            dim_b, dim_r, dim_b, dim_r)
        # joint row index (offset + a*dim_b + b)*dim_r + r
        blk = weight * np.einsum("ac,brds->abrcds", state_a, sigma)
        size = dim_a * dim_b * dim_r
        rows = slice(offset * dim_r, offset * dim_r + size)
        out[rows, rows] += blk.reshape(size, size)
        offset += dim_a * dim_b
    return DensityMatrix(dim=n, entries=out)
