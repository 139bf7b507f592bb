"""Independent numpy/scipy evaluation of reference values frozen into the C++ tests.

Layout is (x_A, p_A, x_B, p_B). Run: python3 tests/oracles/derive_values.py
"""
import numpy as np
from scipy.linalg import expm, block_diag, sqrtm

np.set_printoptions(precision=17)


def J(m):
    return np.block([[np.zeros((m, m)), np.eye(m)], [-np.eye(m), np.zeros((m, m))]])


def sympl_eigs(M):
    m = M.shape[0] // 2
    ev = np.linalg.eigvals(J(m) @ M)
    return np.sort(np.abs(ev.imag))[::-1][::2]


def shadow(S, nA):
    P = np.linalg.inv(S @ S.T)
    a = 2 * nA
    PAA, PAB, PBA, PBB = P[:a, :a], P[:a, a:], P[a:, :a], P[a:, a:]
    schur = PAA - PAB @ np.linalg.solve(PBB, PBA)
    return P, schur, PBB


# Two-mode example: pi/4 rotation in the (x_A, x_B) plane (with matching
# (p_A, p_B) rotation so it stays symplectic) after squeeze diag(2, 1/2) on mode A.
c = s = np.sqrt(0.5)
rot = np.array([[c, 0, -s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, s, 0, c]])
sq = np.diag([2.0, 0.5, 1.0, 1.0])
S = rot @ sq
P, schur, PBB = shadow(S, 1)
lam = sympl_eigs(schur)
print("rot_squeeze schur =", schur.tolist())
print("rot_squeeze lambda =", lam.tolist())
print("rot_squeeze entropy(-sum ln lam) =", -np.log(lam).sum())
print("rot_squeeze det PBB =", np.linalg.det(PBB))

# Two-mode squeeze with parameter r: reduced purity.
for r in (0.3, 0.7):
    ch, sh = np.cosh(r), np.sinh(r)
    # x_A' = ch x_A + sh x_B, p_A' = ch p_A - sh p_B, etc.
    S2 = np.array([[ch, 0, sh, 0], [0, ch, 0, -sh], [sh, 0, ch, 0], [0, -sh, 0, ch]])
    hbar = 1.0
    Sigma = 0.5 * hbar * S2 @ S2.T
    SA = Sigma[:2, :2]
    mu = (hbar / 2) / np.sqrt(np.linalg.det(SA))
    print(f"tms r={r} reduced purity={mu!r} 1/cosh(2r)={1/np.cosh(2*r)!r}")

# Coupled oscillators epsilon = 0.2: purity from exp(tJM).
eps = 0.2
M = np.eye(4)
M[0, 2] = M[2, 0] = eps
JJ = block_diag(J(1), J(1))
for t in (0.5, 1.0, 2.0, 5.0, 10.0, 20.0):
    St = expm(t * JJ @ M)
    P, schur, PBB = shadow(St, 1)
    mu = 1 / np.sqrt(np.linalg.det(PBB))
    print(f"coupled t={t} purity={mu!r} lambda={sympl_eigs(schur).tolist()}")
ts = np.arange(0, 20.0001, 0.01)
mus = [1 / np.sqrt(np.linalg.det(shadow(expm(t * JJ @ M), 1)[2])) for t in ts]
print("coupled min purity on [0,20] =", min(mus), "at t =", ts[int(np.argmin(mus))])

# Quadratic constant Hessian example used by the integrator oracle.
Mq = np.array([[2.0, 0.3, 0.1, 0.0], [0.3, 1.0, 0.0, 0.2], [0.1, 0.0, 1.5, -0.4], [0.0, 0.2, -0.4, 0.8]])
print("quad exp(JM) =", expm(JJ @ Mq).tolist())

# Williamson reconstruction sanity and 2x2 facts.
for d in ([2, 2], [1, 4], [4, 0.25]):
    print("sympl eig diag", d, sympl_eigs(np.diag(d)))

# local harmonic approximation of x^4/4 at x=1: V(1)=1/4, V'(1)=1, V''(1)=3.
print("lha coefficients:", 0.25, 1.0, 3.0 / 2)
