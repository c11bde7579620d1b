"""Non-decay of Bernoulli-type transforms at powers of a Pisot number.

For lam = 1/phi the transform of the Bernoulli convolution does not tend
to zero along xi = phi^k.  The scan below evaluates |mu_hat(phi^k)| from
the exact traces, checks it against a 30-digit direct product, and prints
the certified constant that bounds every k from below.  The same is then
done for simplex systems in 2, 3 and 4 dimensions and for a lower
triangular matrix A = [[phi, 0], [b, c]].
"""
from affinefourier.algebraic import IntPolynomial, certify_pisot
from affinefourier.fourier import RayRestriction, erdos_scan, pisot_matrix_scan
from affinefourier.ifs import bernoulli_ifs

phi = certify_pisot(IntPolynomial.parse("x^2 - x - 1"))
print(f"alpha = {phi.alpha:.15f}, conjugate modulus {phi.conjugate_max:.15f}")

scan = erdos_scan(bernoulli_ifs(phi.lam), phi, 40)
print("\n k   |mu_hat(phi^k)|       split vs direct")
for k in (0, 1, 2, 5, 10, 20, 40):
    print(f"{k:2d}   {abs(scan.values[k]):.12e}   {scan.split_residuals[k]:.1e}")
print(f"\nempirical floor     {scan.floor:.6e}")
print(f"certified bound     {scan.certified_bound:.6e}  (theta={scan.theta:.4f}, N={scan.N})")

print("\nsimplex systems along [1, ..., 1]")
for d in (2, 3, 4):
    s = erdos_scan(RayRestriction.simplex(d, phi.lam), phi, 30, direct=False)
    print(f"  d={d}: floor {s.floor:.6f}, certified {s.certified_bound:.3e}")

print("\ninteger directions in the plane")
for W in ([0, 1], [1, 2], [2, 3]):
    s = erdos_scan(RayRestriction.simplex(2, phi.lam, W), phi, 25, direct=False)
    print(f"  W={W}: floor {s.floor:.6e}")

m = pisot_matrix_scan(phi, b=0.7, c=2.0, k_max=25, direct=False)
print(f"\nA = [[phi, 0], [0.7, 2]]: floor {m.floor:.6e}, "
      f"general evaluator agrees to {max(m.meta['cross_residuals']):.1e}")
