# Rotation solvers, sweep drivers and test oracles
