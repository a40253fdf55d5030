"""Services implementing the thermodynamic-formalism computations."""
