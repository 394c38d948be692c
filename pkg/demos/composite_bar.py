"""A pulse crossing a soft inclusion ``[-4, 4]`` with bond stiffness scaled by beta.

Only the hard exterior enters the boundary kernels, so the same kernel table
serves every beta.
"""
from periabc import enlarged_reference, interface_config, run_scenario
from periabc.harness import cached_kernels, linf_error

dt = 0.005
for beta in (1.0, 0.5, 0.1):
    cfg = interface_config(beta, dt, t_end=40.0, snapshots=(10.0, 15.0, 40.0))
    kernels = cached_kernels(cfg.stencil, dt, 40.0)
    res = run_scenario(cfg, kernels=kernels)
    ref = enlarged_reference(cfg)
    errs = "  ".join(f"t={t:g}: {linf_error(res.snapshots[t][0], ref[t][0]):.2e}" for t in cfg.time.snapshots)
    print(f"beta={beta:<4}  {errs}")
