"""Computable classification machinery for unfoldings of antiholomorphic
parabolic germs: canonical preparation, polynomial vector-field dynamics,
numerical Fatou coordinates and horn maps, and decision predicates."""

__version__ = "0.1.0"
