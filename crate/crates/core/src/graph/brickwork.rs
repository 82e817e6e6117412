use super::{Flow, OpenGraph};
use crate::error::{Error, Result};

/// Dense index of the brickwork vertex at 1-based (row, col), column-major.
pub fn brickwork_vertex(rows: usize, row: usize, col: usize) -> usize {
    (col - 1) * rows + (row - 1)
}

fn check_dimensions(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 {
        return Err(Error::InvalidDimension(
            "brickwork needs at least one row".into(),
        ));
    }
    if cols % 8 != 5 {
        return Err(Error::InvalidDimension(format!(
            "brickwork column count {cols} is not 5 mod 8"
        )));
    }
    Ok(())
}

/// The `rows` x `cols` brickwork graph; column 1 is the input layer, the last column the output layer.
pub fn build_brickwork(rows: usize, cols: usize) -> Result<OpenGraph> {
    check_dimensions(rows, cols)?;
    let v = |i, j| brickwork_vertex(rows, i, j);
    let mut edges = Vec::new();
    for i in 1..=rows {
        for j in 1..cols {
            edges.push((v(i, j), v(i, j + 1)));
        }
    }
    for j in 1..=cols {
        let first_row = match j % 8 {
            3 => 1,
            7 => 2,
            _ => continue,
        };
        if j + 2 > cols {
            continue;
        }
        let mut i = first_row;
        while i < rows {
            edges.push((v(i, j), v(i + 1, j)));
            edges.push((v(i, j + 2), v(i + 1, j + 2)));
            i += 2;
        }
    }
    let inputs = (1..=rows).map(|i| v(i, 1)).collect();
    let outputs = (1..=rows).map(|i| v(i, cols)).collect();
    OpenGraph::new(rows * cols, edges, inputs, outputs)
}

/// Each vertex flows to its right neighbour; measurement is column by column.
pub fn brickwork_flow(rows: usize, cols: usize) -> Result<Flow> {
    check_dimensions(rows, cols)?;
    let mut flow = Flow::default();
    for j in 1..cols {
        for i in 1..=rows {
            flow.successor.insert(
                brickwork_vertex(rows, i, j),
                brickwork_vertex(rows, i, j + 1),
            );
        }
    }
    flow.order = (0..rows * cols).collect();
    Ok(flow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_flow;

    #[test]
    fn single_row_is_a_path() {
        let g = build_brickwork(1, 5).unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn two_by_five_has_two_vertical_pairs() {
        let g = build_brickwork(2, 5).unwrap();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 10);
        let v = |i, j| brickwork_vertex(2, i, j);
        assert!(g.has_edge(v(1, 3), v(2, 3)));
        assert!(g.has_edge(v(1, 5), v(2, 5)));
        assert!(!g.has_edge(v(1, 4), v(2, 4)));
    }

    #[test]
    fn bad_width_is_rejected() {
        assert!(matches!(
            build_brickwork(2, 6),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn even_row_bricks_appear_at_column_seven() {
        let g = build_brickwork(3, 13).unwrap();
        let v = |i, j| brickwork_vertex(3, i, j);
        assert!(g.has_edge(v(2, 7), v(3, 7)));
        assert!(g.has_edge(v(2, 9), v(3, 9)));
        assert!(!g.has_edge(v(1, 7), v(2, 7)));
        assert!(g.has_edge(v(1, 11), v(2, 11)));
    }

    #[test]
    fn flow_is_valid() {
        for (n, m) in [(1, 5), (2, 5), (3, 13), (4, 21)] {
            let g = build_brickwork(n, m).unwrap();
            let f = brickwork_flow(n, m).unwrap();
            assert!(validate_flow(&g, &f));
            assert_eq!(
                f.successor[&brickwork_vertex(n, 1, 1)],
                brickwork_vertex(n, 1, 2)
            );
        }
    }
}
