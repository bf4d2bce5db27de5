"""Chiplet IMC accelerator performance simulator."""
__version__ = "0.1.0"
