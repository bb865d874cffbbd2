#!/usr/bin/env python3

from .quadrature import (
    gauss_hermite, gauss_laguerre
)
from .equicorrelation import (
    EquicorrAlgebra, check_rho, duplication_matrix, equicorrelation_matrix, vec, vech
)
