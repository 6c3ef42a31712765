"""Independent-set reconfiguration: exact oracle, kernels, sliding engines and hardness gadgets."""
