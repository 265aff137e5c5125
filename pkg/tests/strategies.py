"""Hypothesis strategies for small Gaussian-rational data."""

from hypothesis import strategies as st

from preserver_lab.matrix import Matrix
from preserver_lab.scalar import Scalar

small_int = st.integers(-6, 6)
rationals = st.tuples(small_int, st.integers(1, 5))


@st.composite
def scalars(draw, complex_=True):
    rn, rd = draw(rationals)
    if complex_ and draw(st.booleans()):
        im_n, im_d = draw(rationals)
    else:
        im_n, im_d = 0, 1
    return Scalar(rn, 0) / rd + Scalar(0, im_n) / im_d


nonzero_scalars = scalars().filter(bool)


@st.composite
def matrices(draw, n=None, lo=2, hi=4):
    n = n if n is not None else draw(st.integers(lo, hi))
    return Matrix([[draw(scalars()) for _ in range(n)] for _ in range(n)])


@st.composite
def invertible_matrices(draw, n):
    m = draw(matrices(n=n))
    if not m.is_invertible():
        # entries are bounded by 6, so a shift of 97 makes the matrix diagonally dominant
        m = m + Matrix.identity(n).scale(97)
    return m


@st.composite
def vectors(draw, n):
    v = tuple(draw(scalars()) for _ in range(n))
    if not any(v):
        v = (Scalar(1),) + v[1:]
    return v
