from pydantic_settings import BaseSettings


class OracleSettings(BaseSettings):
    max_supply_edges: int = 22
    max_capacity_sum: int = 64
    max_paths: int = 64

    class Config:
        env_prefix = "PLANEMF_ORACLE_"
