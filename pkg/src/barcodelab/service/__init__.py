"""HTTP service: public data API, taxonomy, identification, workbench."""
