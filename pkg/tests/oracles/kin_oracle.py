"""Independent brute-force oracle for the scissor-linkage math.

Transcribes each formula directly with math.* calls and inverts the
displacement->angle map by bisection only.  Deliberately written before and
apart from the library: no imports from the package, no shared helpers, so
test comparisons against it are meaningful.
"""

import math

# Table I geometry (mm)
A = 6.5
B = 8.0
LJ = 22.3
H = 2.5
L0 = 13.6


def theta_o_deg(a=A, h=H):
    return math.degrees(math.asin(h / a))


def alpha_deg(dl, a=A, b=B, l0=L0):
    ps = l0 - dl
    arg = (b * b - a * a - ps * ps) / (-2.0 * a * ps)
    return math.degrees(math.acos(arg))


def theta_total_deg(dl, a=A, b=B, h=H, l0=L0):
    return 2.0 * (alpha_deg(dl, a, b, l0) - theta_o_deg(a, h))


def width_mm(dl, a=A, b=B, h=H, l0=L0, lj=LJ):
    return 2.0 * lj * math.sin(math.radians(theta_total_deg(dl, a, b, h, l0) / 2.0))


def alpha_b_deg(alpha, a=A, b=B):
    return math.degrees(math.asin(a * math.sin(math.radians(alpha)) / b))


def alpha_a_deg(alpha, a=A, b=B):
    return alpha + alpha_b_deg(alpha, a, b) - 90.0


def tip_force(dl, f_in, a=A, b=B, l0=L0, lj=LJ):
    al = alpha_deg(dl, a, b, l0)
    ab = alpha_b_deg(al, a, b)
    aa = alpha_a_deg(al, a, b)
    return (a / (2.0 * lj)) * math.cos(math.radians(aa)) * math.cos(math.radians(ab)) * f_in


def dl_from_theta_total(theta, a=A, b=B, h=H, l0=L0, lo=0.0, hi=None):
    """Invert theta_total_deg by plain bisection (no closed form)."""
    if hi is None:
        hi = l0 - abs(a - b) - 1e-9
    flo = theta_total_deg(lo, a, b, h, l0) - theta
    fhi = theta_total_deg(hi, a, b, h, l0) - theta
    if flo > 0.0 or fhi < 0.0:
        raise ValueError("target angle not bracketed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if theta_total_deg(mid, a, b, h, l0) - theta <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def virtual_work_ratio(dl, a=A, b=B, l0=L0, lj=LJ):
    """Ideal F_T/F_IN from a central finite difference of the jaw angle."""
    eps = 1e-6
    th1 = math.radians(theta_total_deg(dl - eps) / 2.0)
    th2 = math.radians(theta_total_deg(dl + eps) / 2.0)
    djaw_ddl = (th2 - th1) / (2.0 * eps)
    return 1.0 / (2.0 * lj * djaw_ddl)


def mae(pairs):
    """Mean absolute error, summed in reverse order via fsum."""
    errs = [abs(r - m) for (r, m) in pairs]
    return math.fsum(reversed(errs)) / len(errs)


def flex_tendon_mm(bend_deg, n=6, r=3.0):
    """Serial-hinge tendon take-up: 2 n r sin(bend / 2n)."""
    return 2.0 * n * r * math.sin(math.radians(bend_deg / (2.0 * n)))


if __name__ == "__main__":
    print(f"theta_o            = {theta_o_deg():.9f} deg")
    for dl in (0.0, 2.0, 4.0):
        al = alpha_deg(dl)
        print(f"dl={dl:4.1f}  alpha={al:.9f}  theta_total={theta_total_deg(dl):.9f}"
              f"  W={width_mm(dl):.9f}  aB={alpha_b_deg(al):.9f}  aA={alpha_a_deg(al):.9f}")
    print(f"F_T/F_IN @ dl=2.0  = {tip_force(2.0, 1.0):.9f}")
    print(f"vw ratio @ dl=2.0  = {virtual_work_ratio(2.0):.9f}")
    for th in (0.0, 37.9, 66.1, 90.0):
        print(f"dl(theta_total={th:5.1f}) = {dl_from_theta_total(th):.9f}")
    print(f"flex tendon @ 90deg = {flex_tendon_mm(90.0):.9f} mm")
    print(f"theta_total(0) = {theta_total_deg(0.0):.9f}")
