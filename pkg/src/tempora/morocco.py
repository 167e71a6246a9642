"""Built-in Morocco case study: parameters, initial data, published constants.

The published reference values are compared against recomputations by the
``reproduce-example`` audit and by the ``paper_delta`` section of analysis
reports; the audit reports deltas side by side and never alters them.
"""

from .model import SicaParams, State

N0 = 325235.0

PARAMS = SicaParams(
    Lambda=2190.0,
    beta=2.7e-7,
    nu=0.39,
    rho=0.2,
    phi=0.1,
    gamma=0.33,
    omega=0.09,
    d=1.0,
    eta_C=0.5,
    eta_A=1.5,
)

INITIAL = State(1.0 - 11.0 / N0, 2.0 / N0, 0.0, 9.0 / N0)

# one tick per day on the unit lattice; 7 years
HORIZON_TICKS = 2555
TIMESCALE_LITERAL = "Z[0,2555]"

PUBLISHED = {
    "M1": 5615.384615,
    "M2": 0.002773104793,
    "M3": 0.0005777301652,
    "M4": 0.0003224540457,
    "m1": 5615.381462,
    "m2": 5.478704120e-9,
    "m3": 1.141396692e-9,
    "m4": 6.370586186e-10,
    "Gamma1": 0.39,
    "Gamma2": 0.37,
    "Psi": 0.01391941151,
}
