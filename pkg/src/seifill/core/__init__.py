"""Pure building blocks: continued fractions and shared protocols."""
