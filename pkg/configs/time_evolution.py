# Coverage of the second hop and of the relay link as the serving RN flies
# towards the UE, at a 0 dB threshold.
#
#   uavrelay run configs/time_evolution.py

c = get_config()

c.NetworkParams.lambda_T = 5e-8
c.NetworkParams.lambda_R = 1e-7
c.NetworkParams.v = 40.0  # [m/s]

# linear intercepts (-20 dB)
c.PathLossParams.A_AL = 0.01
c.PathLossParams.A_AN = 0.01

c.Experiment.name = "time_evolution"
c.Experiment.engine = "analytic"
c.Experiment.quantities = ["second_hop", "relay_link"]
c.Experiment.beta_dB = 0.0
c.Experiment.axes = [
    {"name": "H_R", "values": [300, 1000, 2000]},
    {"name": "t_over_T", "min": 0, "max": 3, "points": 25},
]
