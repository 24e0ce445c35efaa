from pydantic_settings import BaseSettings


class SolverSettings(BaseSettings):
    path_cap: int = 20000
    uncross_budget_factor: int = 8
    cross_check_chain_lp: bool = True
    verify_outputs: bool = True

    class Config:
        env_prefix = "PLANEMF_SOLVER_"
