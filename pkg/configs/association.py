# Probability of association with the relay over RN altitude and density,
# right after deployment and once the RNs have flown for 100 s.
#
#   uavrelay run configs/association.py

c = get_config()

c.NetworkParams.lambda_T = 5e-8
c.NetworkParams.v = 40.0  # [m/s]

c.Experiment.name = "association"
c.Experiment.engine = "analytic"
c.Experiment.quantities = ["association"]
c.Experiment.axes = [
    {"name": "t", "values": [0, 100]},
    {"name": "H_R", "min": 100, "max": 2000, "points": 20},
    {"name": "lambda_R", "min": 1e-8, "max": 1e-6, "points": 21, "scale": "log"},
]
