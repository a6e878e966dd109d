"""Nonlinear m-term approximation and metric entropy in finite-dimensional l_p."""
