"""Discrete Bessel Fredholm determinants, equilibrium measures and their large-t asymptotics."""
