"""blockcast: synthetic mmWave blockage scenes, LiDAR denoising, and prediction baselines."""

__version__ = "0.1.0"
