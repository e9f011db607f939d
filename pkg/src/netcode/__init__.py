"""netcode: compile synchronous multiparty protocols on digraphs into
noise-robust simulations and run them against adversarial channels."""

__version__ = "0.1.0"
