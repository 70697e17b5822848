# Cross-validation run: analytic engine against the Monte-Carlo simulator on
# the reference network.
#
#   uavrelay run configs/default.py
#   uavrelay compare results/default.csv

c = get_config()

# -- network ------------------------------------------------------------------
c.NetworkParams.lambda_T = 5e-8  # TBS density [1/m^2]
c.NetworkParams.lambda_R = 1e-7  # RN density [1/m^2]
c.NetworkParams.H_R = 1000.0  # RN altitude [m], swept below
c.NetworkParams.P_T = 1.0  # [W]
c.NetworkParams.P_R = 1.0  # [W]
c.NetworkParams.sigma2 = 1e-10  # noise power [W]
c.NetworkParams.v = 40.0  # UAV speed [m/s]
c.NetworkParams.G_TM = 2.0
c.NetworkParams.G_Tm = 0.5
c.NetworkParams.G_RM = 1.0
c.NetworkParams.G_Rm = 1.0

# -- channel ------------------------------------------------------------------
# The intercepts are LINEAR factors of L(d) = A * d**alpha, not dB values:
# 0.01 is an intercept of -20 dB.
c.PathLossParams.A_GL = 0.01
c.PathLossParams.A_GN = 0.01
c.PathLossParams.A_AL = 0.01
c.PathLossParams.A_AN = 0.01
c.PathLossParams.alpha_GL = 3.0
c.PathLossParams.alpha_GN = 4.0
c.PathLossParams.alpha_AL = 3.0
c.PathLossParams.alpha_AN = 4.0

c.LosModelParams.d1 = 18.0  # [m]
c.LosModelParams.d2 = 63.0  # [m]
c.LosModelParams.a = 9.612
c.LosModelParams.b = 0.158

c.RicianKModel.K_GL = 10.0
c.RicianKModel.K_GN = 0.0
c.RicianKModel.K_AL = 10.0
c.RicianKModel.K_AN = 0.0

# -- simulator ----------------------------------------------------------------
c.MonteCarloSimulator.n_drops = 50000
c.MonteCarloSimulator.disk_radius = 100e3  # [m]
c.MonteCarloSimulator.seed = 20240101

# -- sweep --------------------------------------------------------------------
c.Experiment.name = "default"
c.Experiment.engine = "both"
c.Experiment.scheme = "scheme2"
c.Experiment.quantities = ["total", "direct_link", "association"]
c.Experiment.axes = [
    {"name": "H_R", "values": [100, 300, 1000, 2000]},
    {"name": "t_over_T", "values": [0, 2.5]},
    {"name": "beta_dB", "values": [-10, -5, 0, 5, 10, 20]},
]
