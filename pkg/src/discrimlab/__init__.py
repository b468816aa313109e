"""
discrimlab - operational discriminability of two pure states, preparation
noncontextual bounds on the same game, and CHSH certification from SWAP
statistics.
"""
__version__ = "0.1.0"
