# Shared data model, signal chain, metrics and experiment harness
