"""Domain services built on the models and the continued-fraction core."""
