"""Hot guidance/interpolation kernels with backend selection.

The compiled Cython extension is preferred; the pure-NumPy fallback is
selected when the extension is unavailable or when the environment
variable ``PILOTLAB_PURE_PYTHON=1`` is set.  Both implement the same
contract and are cross-checked in the test suite:

* 4-point cubic Lagrange interpolation per axis (tensor product in 2D),
  periodic wraparound or clamped stencils at hard walls;
* guidance terms: component-summed Im(conj(psi) * grad psi) and density
  |psi|^2 interpolated at off-grid points.
"""
import os

from . import _fallback

if os.environ.get("PILOTLAB_PURE_PYTHON") == "1":
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _compiled as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

interp_cubic_1d = _impl.interp_cubic_1d
interp_cubic_2d = _impl.interp_cubic_2d
guidance_terms_1d = _impl.guidance_terms_1d
guidance_terms_2d = _impl.guidance_terms_2d

__all__ = [
    "BACKEND",
    "interp_cubic_1d",
    "interp_cubic_2d",
    "guidance_terms_1d",
    "guidance_terms_2d",
]
