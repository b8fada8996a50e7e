"""atomlaser - stationary photon statistics of the single-atom laser."""

__version__ = "0.1.0"
__description__ = (
    "Husimi-function theory of the incoherently pumped single-atom laser, "
    "with a master-equation oracle"
)
