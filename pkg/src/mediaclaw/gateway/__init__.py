"""HTTP and CLI surfaces over the platform."""
