"""Adiabatic perturbation theory toolkit for slowly varying Hamiltonians."""
