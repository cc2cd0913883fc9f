from mixedtraces.experiments import ExperimentRunner, PipelineParams
from mixedtraces.default_config import DEFAULT_CONFIG

# Create a custom config
config = DEFAULT_CONFIG.copy()
config["max_level"] = 10  # Shallower Whitney decompositions
config["family_size"] = 10  # Fewer test functions
config["results_dir"] = "./results"

# Initialize with custom config
runner = ExperimentRunner("extension-bound", "unit_square_bottom_d", PipelineParams(s_list=[0.5], p_list=[2.0]), config=config)

# run the pipeline and write the bundle
bundle = runner.run(check_determinism=True)
print(bundle.summary)
