"""Baseline: reproduction_runs

Revision ID: 001
Revises:
Create Date: 2026-10-19

Tabelle fuer gespeicherte Laeufe der Existenztabelle.
Idempotent: die Tabelle wird nur erstellt, wenn sie noch nicht existiert.
"""
from typing import Sequence, Union
from alembic import op
import sqlalchemy as sa

revision: str = '001'
down_revision: Union[str, None] = None
branch_labels: Union[str, Sequence[str], None] = None
depends_on: Union[str, Sequence[str], None] = None


def upgrade() -> None:
    conn = op.get_bind()
    inspector = sa.inspect(conn)
    existing_tables = inspector.get_table_names()

    if 'reproduction_runs' not in existing_tables:
        op.create_table(
            'reproduction_runs',
            sa.Column('id', sa.Integer(), nullable=False),
            sa.Column('created_at', sa.DateTime(), server_default=sa.func.now()),
            sa.Column('seed', sa.Integer(), nullable=False),
            sa.Column('samples', sa.Integer(), nullable=False),
            sa.Column('cells_passed', sa.Integer(), nullable=False),
            sa.Column('cells_total', sa.Integer(), nullable=False),
            sa.Column('runtime_seconds', sa.Float(), nullable=False),
            sa.Column('matrix_json', sa.Text(), nullable=False),
            sa.PrimaryKeyConstraint('id')
        )
        op.create_index(op.f('ix_reproduction_runs_id'), 'reproduction_runs', ['id'], unique=False)
        op.create_index(op.f('ix_reproduction_runs_created_at'), 'reproduction_runs', ['created_at'], unique=False)


def downgrade() -> None:
    op.drop_index(op.f('ix_reproduction_runs_created_at'), table_name='reproduction_runs')
    op.drop_index(op.f('ix_reproduction_runs_id'), table_name='reproduction_runs')
    op.drop_table('reproduction_runs')
