from slotlime.figures.tables import (
    FIGURE_BUILDERS,
    FigureTable,
    build_figure,
    four_server_loss,
    four_server_response,
    loss_profile,
    optimal_fast_buffer_loss,
    optimal_fast_buffer_response,
    response_profile,
    uniform_grid,
)
